#include <unistd.h>

#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "gradcheck.hpp"
#include "hoi/numerics/mlp.hpp"
#include "hoi/numerics/rotation.hpp"
#include "hoi/numerics/serialize.hpp"
#include "hoi/numerics/tape.hpp"
#include "hoi/rng.hpp"

using namespace hoi;

TEST_CASE("matmul against a worked example") {
  Tensor a = Tensor::from(2, 3, {1, 2, 3, 4, 5, 6});
  Tensor b = Tensor::from(3, 2, {7, 8, 9, 10, 11, 12});
  Tensor c;
  matmul(a, b, c);
  CHECK(c.at(0, 0) == 58.0);
  CHECK(c.at(0, 1) == 64.0);
  CHECK(c.at(1, 0) == 139.0);
  CHECK(c.at(1, 1) == 154.0);
}

TEST_CASE("transposed matmul kernels agree with explicit transposes") {
  Rng rng(7);
  Tensor a = Tensor::zeros(4, 5), b = Tensor::zeros(3, 5), d = Tensor::zeros(4, 6);
  for (double& v : a.data) v = rng.uniform(-1, 1);
  for (double& v : b.data) v = rng.uniform(-1, 1);
  for (double& v : d.data) v = rng.uniform(-1, 1);

  Tensor bt = Tensor::zeros(5, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) bt.at(j, i) = b.at(i, j);
  Tensor want, got;
  matmul(a, bt, want);
  matmul_nt(a, b, got);
  for (int64_t i = 0; i < want.numel(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));

  Tensor at = Tensor::zeros(5, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) at.at(j, i) = a.at(i, j);
  matmul(at, d, want);
  matmul_tn(a, d, got);
  for (int64_t i = 0; i < want.numel(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("reverse-mode gradients match central differences on targeted graphs") {
  using testing::gradcheck;

  SUBCASE("mlp scalar loss") {
    Rng rng(3);
    MlpParams p = mlp_init(4, {8, 6}, 3, rng);
    Tensor x = Tensor::zeros(5, 4);
    for (double& v : x.data) v = rng.uniform(-1, 1);
    std::vector<Tensor> leaves = {p.W[0], p.b[0], p.W[1], p.b[1], p.W[2], p.b[2], x};
    const double err = gradcheck(leaves, [](Tape& t, std::vector<Var>& vs) {
      MlpVars mv;
      mv.W = {vs[0], vs[2], vs[4]};
      mv.b = {vs[1], vs[3], vs[5]};
      Var y = mlp_forward(t, mv, vs[6]);
      return t.mean_all(t.square(y));
    });
    CHECK(err < 1e-5);
  }

  SUBCASE("piecewise ops evaluated away from their kinks") {
    Tensor a = Tensor::from(2, 3, {0.5, -0.7, 1.2, -0.3, 0.9, -1.1});
    Tensor b = Tensor::from(2, 3, {-0.2, 0.4, 0.8, 1.0, -0.6, 0.3});
    const double err = gradcheck({a, b}, [](Tape& t, std::vector<Var>& vs) {
      Var m = t.max2(vs[0], vs[1]);
      Var c = t.clamp(m, -0.95, 0.95);
      return t.mean_all(t.mul(c, vs[0]));
    });
    CHECK(err < 1e-5);
  }

  SUBCASE("group max with separated values") {
    Tensor a = Tensor::from(4, 2, {0.1, 2.0, 1.5, 0.3, -0.4, -2.0, 0.9, 1.1});
    const double err = gradcheck({a}, [](Tape& t, std::vector<Var>& vs) {
      return t.mean_all(t.square(t.group_max(vs[0], 2)));
    });
    CHECK(err < 1e-5);
  }

  SUBCASE("gaussian log-prob shaped graph") {
    Tensor mu = Tensor::from(3, 2, {0.3, -0.5, 0.8, 0.2, -0.9, 0.4});
    Tensor logstd = Tensor::from(1, 2, {-0.3, 0.25});
    Tensor act = Tensor::from(3, 2, {0.5, -0.1, 0.2, 0.6, -0.5, 0.1});
    const double err = gradcheck({mu, logstd}, [&](Tape& t, std::vector<Var>& vs) {
      Var a = t.constant(act);
      Var inv_std = t.exp(t.neg(vs[1]));
      Var z = t.mul_row(t.sub(a, vs[0]), inv_std);
      Var logp = t.scale(t.row_sum(t.square(z)), -0.5);
      logp = t.add_scalar_var(logp, t.scale(t.sum_all(vs[1]), -1.0));
      return t.mean_all(logp);
    });
    CHECK(err < 1e-5);
  }
}

TEST_CASE("a sample of random graphs passes the finite-difference oracle") {
  for (uint64_t s = 0; s < 10; ++s) {
    const double err = testing::random_graph_check(s);
    INFO("seed ", s);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("backward contract errors") {
  Tape t;
  Var x = t.leaf(Tensor::from(2, 2, {1, 2, 3, 4}));
  Var y = t.square(x);
  CHECK_THROWS_AS(t.backward(y), ContractError);       // non-scalar, no seed
  CHECK_THROWS_AS((void)x.grad(), ContractError);      // before backward
  Tensor seed = Tensor::zeros(2, 2);
  seed.data = {1, 1, 1, 1};
  t.backward(y, seed);
  CHECK(x.grad().at(1, 1) == 8.0);
}

TEST_CASE("constants do not accumulate gradients") {
  Tape t;
  Var x = t.leaf(Tensor::scalar(2.0));
  Var c = t.constant(Tensor::scalar(5.0));
  Var y = t.mean_all(t.mul(x, c));
  t.backward(y);
  CHECK(x.grad()[0] == 5.0);
  CHECK_THROWS_AS((void)c.grad(), ContractError);
}

TEST_CASE("elu values and continuity") {
  Tape t;
  Var x = t.leaf(Tensor::from({1.0, 0.0, -1.0, 1e-12, -1e-12}));
  const Tensor& y = t.val(t.elu(x));
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
  CHECK(std::abs(y[3]) < 1e-11);
  CHECK(std::abs(y[4]) < 1e-11);
}

TEST_CASE("quat_rotate matches rotation-matrix application") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Quat q = quat_normalize({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    Vec3 v = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec3 a = quat_rotate(q, v);
    const Vec3 b = mat_apply(quat_to_mat(q), v);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-12);
    // rotation preserves length
    CHECK(norm(a) == doctest::Approx(norm(v)).epsilon(1e-12));
  }
}

TEST_CASE("geodesic distance folds the double cover") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    Quat q = quat_normalize({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    CHECK(quat_geodesic(q, q) == 0.0);
    Quat nq = {-q.w, -q.x, -q.y, -q.z};
    CHECK(quat_geodesic(q, nq) == 0.0);
  }
  // known angle: rotating by theta about an axis is theta away from identity
  for (double th : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    const Quat q = quat_exp({0, 0, th});
    CHECK(quat_geodesic(Quat{}, q) == doctest::Approx(th).epsilon(1e-12));
  }
  // symmetry and rough triangle inequality on random triples
  for (int i = 0; i < 50; ++i) {
    Quat a = quat_normalize({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    Quat b = quat_normalize({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    Quat c = quat_normalize({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    CHECK(quat_geodesic(a, b) == doctest::Approx(quat_geodesic(b, a)).epsilon(1e-12));
    CHECK(quat_geodesic(a, c) <= quat_geodesic(a, b) + quat_geodesic(b, c) + 1e-9);
  }
}

TEST_CASE("matrix/quaternion round trips") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    Quat q = quat_normalize({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    const Quat r = mat_to_quat(quat_to_mat(q));
    CHECK(quat_geodesic(q, r) < 1e-7);
  }
}

TEST_CASE("six-number rotation encoding produces orthonormal frames") {
  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    std::array<double, 6> r;
    for (double& v : r) v = rng.uniform(-2, 2);
    const Mat3 m = rot6_to_mat(r);
    const Mat3 mtm = mat_mul(mat_transpose(m), m);
    for (int k = 0; k < 9; ++k)
      CHECK(std::abs(mtm[size_t(k)] - (k % 4 == 0 ? 1.0 : 0.0)) < 1e-12);
    // right-handed
    const Vec3 c0 = {m[0], m[3], m[6]}, c1 = {m[1], m[4], m[7]}, c2 = {m[2], m[5], m[8]};
    const Vec3 cx = cross(c0, c1);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(cx[size_t(k)] - c2[size_t(k)]) < 1e-12);
  }
  // round trip from a genuine rotation
  for (int i = 0; i < 100; ++i) {
    Quat q = quat_normalize({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    const Mat3 m = quat_to_mat(q);
    const Mat3 m2 = rot6_to_mat(mat_to_rot6(m));
    for (int k = 0; k < 9; ++k) CHECK(std::abs(m[size_t(k)] - m2[size_t(k)]) < 1e-12);
  }
}

TEST_CASE("constant-axis integration accumulates the exact angle") {
  Quat q;
  const Vec3 w = {0.0, 0.0, 1.5707963267948966};  // pi/2 per second
  for (int i = 0; i < 100; ++i) q = quat_integrate(q, w, 0.01);
  CHECK(quat_yaw(q) == doctest::Approx(1.5707963267948966).epsilon(1e-10));
}

TEST_CASE("mlp eval path equals taped path bit for bit") {
  Rng rng(23);
  MlpParams p = mlp_init(6, {16, 12}, 4, rng);
  Tensor x = Tensor::zeros(3, 6);
  for (double& v : x.data) v = rng.uniform(-2, 2);
  const Tensor y0 = mlp_forward(p, x);
  Tape t;
  MlpVars v = mlp_leaves(t, p);
  const Tensor& y1 = t.val(mlp_forward(t, v, t.constant(x)));
  REQUIRE(y0.numel() == y1.numel());
  for (int64_t i = 0; i < y0.numel(); ++i) CHECK(y0[i] == y1[i]);
}

TEST_CASE("mlp batch rows are independent") {
  Rng rng(29);
  MlpParams p = mlp_init(5, {8}, 2, rng);
  Tensor x = Tensor::zeros(4, 5);
  for (double& v : x.data) v = rng.uniform(-1, 1);
  const Tensor batch = mlp_forward(p, x);
  for (int64_t i = 0; i < 4; ++i) {
    Tensor row = Tensor::zeros(1, 5);
    for (int64_t j = 0; j < 5; ++j) row[j] = x.at(i, j);
    const Tensor yi = mlp_forward(p, row);
    for (int64_t j = 0; j < 2; ++j) CHECK(yi[j] == batch.at(i, j));
  }
}

TEST_CASE("checkpoint round trip is bit exact") {
  NamedTensors params;
  Rng rng(31);
  Tensor a = Tensor::zeros(3, 4);
  for (double& v : a.data) v = rng.normal();
  a.data[0] = -0.0;
  a.data[1] = 5e-324;  // denormal survives
  Tensor b = Tensor::from({1.0, 2.0, 3.0});
  Tensor c;
  c.shape = {2, 2, 2};
  c.data = {1, 2, 3, 4, 5, 6, 7, 8};
  params.emplace_back("net.W0", a);
  params.emplace_back("ema.net.W0", b);
  params.emplace_back("cube", c);

  const std::string path = "/tmp/hoi_test_ckpt.bin";
  save_params(path, params);
  const NamedTensors back = load_params(path);
  REQUIRE(back.size() == params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    CHECK(back[i].first == params[i].first);
    REQUIRE(back[i].second.shape == params[i].second.shape);
    for (size_t j = 0; j < params[i].second.data.size(); ++j) {
      const uint64_t* x = reinterpret_cast<const uint64_t*>(&params[i].second.data[j]);
      const uint64_t* y = reinterpret_cast<const uint64_t*>(&back[i].second.data[j]);
      CHECK(*x == *y);
    }
  }
}

TEST_CASE("checkpoint loader rejects damaged files") {
  CHECK_THROWS_AS(load_params("/tmp/does_not_exist.bin"), RuntimeFault);
  const std::string path = "/tmp/hoi_test_bad.bin";
  {
    FILE* f = fopen(path.c_str(), "wb");
    fwrite("NOTMAGIC", 1, 8, f);
    fclose(f);
  }
  CHECK_THROWS_AS(load_params(path), RuntimeFault);
  // truncated: valid header claiming one entry, then EOF
  NamedTensors params;
  params.emplace_back("w", Tensor::from({1, 2, 3, 4}));
  save_params(path, params);
  {
    FILE* f = fopen(path.c_str(), "rb");
    fseek(f, 0, SEEK_END);
    long sz = ftell(f);
    fclose(f);
    (void)truncate(path.c_str(), sz - 9);
  }
  CHECK_THROWS_AS(load_params(path), RuntimeFault);
}

TEST_CASE("keyed rng streams are reproducible and distinct") {
  Rng a = Rng::keyed(42, 1, 2, 3);
  Rng b = Rng::keyed(42, 1, 2, 3);
  Rng c = Rng::keyed(42, 1, 2, 4);
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) {
    const uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    any_diff |= (va != c.next_u64());
  }
  CHECK(any_diff);
}

TEST_CASE("normal draws have sane moments") {
  Rng r(101);
  double s = 0, s2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}
