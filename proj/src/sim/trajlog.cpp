#include "hoi/sim/trajlog.hpp"

#include <fstream>

#include "hoi/error.hpp"
#include "hoi/sim/env.hpp"
#include "json.hpp"

namespace hoi::sim {

namespace {

using nlohmann::json;

json vec_j(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }
json quat_j(const Quat& q) { return json::array({q.w, q.x, q.y, q.z}); }

Vec3 vec_p(const json& j) {
  check(j.is_array() && j.size() == 3, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Quat quat_p(const json& j) {
  check(j.is_array() && j.size() == 4, "expected a quaternion");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json rigid_j(const RigidState& s) {
  return {{"p", vec_j(s.p)}, {"q", quat_j(s.q)}, {"v", vec_j(s.v)}, {"w", vec_j(s.w)},
          {"a", vec_j(s.a)}, {"alpha", vec_j(s.alpha)}};
}

RigidState rigid_p(const json& j) {
  RigidState s;
  s.p = vec_p(j.at("p"));
  s.q = quat_p(j.at("q"));
  s.v = vec_p(j.at("v"));
  s.w = vec_p(j.at("w"));
  if (j.contains("a")) s.a = vec_p(j.at("a"));
  if (j.contains("alpha")) s.alpha = vec_p(j.at("alpha"));
  return s;
}

}  // namespace

void write_trajectory(const std::string& path, const std::vector<TrajFrame>& frames) {
  std::ofstream out(path);
  check_runtime(out.good(), "cannot open trajectory file for writing: " + path);
  for (const TrajFrame& f : frames) {
    json j;
    j["t"] = f.t;
    j["q"] = f.q;
    j["qd"] = f.qd;
    j["root"] = rigid_j(f.root);
    json objs = json::array();
    for (size_t i = 0; i < f.objects.size(); ++i) {
      json o = rigid_j(f.objects[i]);
      o["id"] = int(i);
      objs.push_back(std::move(o));
    }
    j["objects"] = std::move(objs);
    j["feet"] = json::array({f.feet[0], f.feet[1]});
    json contacts = json::array();
    for (const ContactRecord& c : f.contacts)
      contacts.push_back({{"obj", c.object},
                          {"ee", c.ee},
                          {"mask", c.mask},
                          {"force", c.force},
                          {"tgt", vec_j(c.tgt)}});
    j["contacts"] = std::move(contacts);
    if (!f.bodies.empty()) {
      json bodies = json::array();
      for (const Vec3& p : f.bodies) bodies.push_back(vec_j(p));
      j["bodies"] = std::move(bodies);
    }
    if (f.ref) {
      json r;
      r["q"] = f.ref->q;
      r["root"] = rigid_j(f.ref->root);
      json robjs = json::array();
      for (const RigidState& o : f.ref->objects) robjs.push_back(rigid_j(o));
      r["objects"] = std::move(robjs);
      r["feet"] = json::array({f.ref->feet[0], f.ref->feet[1]});
      j["ref"] = std::move(r);
    }
    if (!f.rewards.empty()) {
      json r = json::object();
      for (const auto& [name, value] : f.rewards) r[name] = value;
      j["rewards"] = std::move(r);
    }
    out << j.dump() << "\n";
  }
  check_runtime(out.good(), "trajectory write failed: " + path);
}

std::vector<TrajFrame> read_trajectory(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), "cannot open trajectory file: " + path);
  std::vector<TrajFrame> frames;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ContractError("trajectory line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      TrajFrame f;
      f.t = j.at("t").get<double>();
      f.q = j.at("q").get<std::vector<double>>();
      f.qd = j.at("qd").get<std::vector<double>>();
      f.root = rigid_p(j.at("root"));
      for (const json& o : j.at("objects")) f.objects.push_back(rigid_p(o));
      const json& feet = j.at("feet");
      check(feet.is_array() && feet.size() == 2, "feet must have two entries");
      f.feet = {feet[0].get<bool>(), feet[1].get<bool>()};
      for (const json& c : j.at("contacts")) {
        ContactRecord rec;
        rec.object = c.at("obj").get<int>();
        rec.ee = c.at("ee").get<int>();
        rec.mask = c.at("mask").get<bool>();
        rec.force = c.at("force").get<double>();
        rec.tgt = vec_p(c.at("tgt"));
        f.contacts.push_back(rec);
      }
      if (j.contains("bodies"))
        for (const json& b : j.at("bodies")) f.bodies.push_back(vec_p(b));
      if (j.contains("ref")) {
        RefSnapshot r;
        const json& rj = j.at("ref");
        r.q = rj.at("q").get<std::vector<double>>();
        r.root = rigid_p(rj.at("root"));
        for (const json& o : rj.at("objects")) r.objects.push_back(rigid_p(o));
        r.feet = {rj.at("feet")[0].get<bool>(), rj.at("feet")[1].get<bool>()};
        f.ref = std::move(r);
      }
      if (j.contains("rewards"))
        for (const auto& [name, value] : j.at("rewards").items())
          f.rewards.emplace_back(name, value.get<double>());
      frames.push_back(std::move(f));
    } catch (const json::exception& e) {
      throw ContractError("trajectory line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return frames;
}

TrajFrame capture_frame(const Env& env, bool with_ref) {
  const WorldState& s = env.state();
  TrajFrame f;
  f.t = s.t;
  f.q.assign(s.q.begin(), s.q.end());
  f.qd.assign(s.qd.begin(), s.qd.end());
  f.root = s.root;
  f.objects = s.objects;
  f.feet = {s.feet[0].label, s.feet[1].label};
  const StepForces& forces = env.last_forces();
  const std::vector<GraspCommand>& grasps = env.grasps();
  for (size_t i = 0; i < grasps.size(); ++i) {
    const GraspCommand& g = grasps[i];
    ContactRecord rec;
    rec.object = g.object;
    rec.ee = g.ee;
    rec.mask = g.active;
    rec.force = i < forces.grasp_force.size() ? forces.grasp_force[i] : 0.0;
    const RigidState& o = s.objects[size_t(g.object)];
    const ObjectModel& om = env.world().objects[size_t(g.object)];
    rec.tgt = o.p + quat_rotate(o.q, om.sites[size_t(g.site)].pos);
    f.contacts.push_back(rec);
  }
  if (with_ref) {
    const RefFrame& rf = env.ref_frame();
    RefSnapshot r;
    r.q.assign(rf.q.begin(), rf.q.end());
    r.root = rf.root;
    r.objects = rf.objects;
    r.feet = rf.feet_contact;
    f.ref = std::move(r);
  }
  return f;
}

}  // namespace hoi::sim
