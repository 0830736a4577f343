#include <algorithm>

#include <json.hpp>

#include "dali/engine.hpp"

namespace dali {

std::string trace_line(const StepRecord& r) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["case"] = to_string(r.kase);
  j["agent"] = r.agent;
  j["selected"] = r.selected;
  j["component"] = r.component;
  j["ev"] = r.after.ev;
  j["iv"] = r.after.iv;
  j["pv"] = r.after.pv;
  if (r.performed)
    j["performed"] = *r.performed;
  else
    j["performed"] = nullptr;
  return j.dump();
}

namespace {

bool subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::all_of(a.begin(), a.end(), [&](const auto& x) { return std::find(b.begin(), b.end(), x) != b.end(); });
}

}  // namespace

std::vector<std::string> contract_violations(const StepRecord& r) {
  std::vector<std::string> out;
  const auto& b = r.before;
  const auto& a = r.after;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) out.push_back("step " + std::to_string(r.step) + " case " + std::string(to_string(r.kase)) + ": " + what);
  };

  // PV never shrinks, whatever the case.
  expect(subset(b.pv, a.pv), "PV shrank");

  switch (r.kase) {
    case Case::i:
    case Case::iii:
    case Case::vi:
      expect(a.ev == b.ev, "EV changed");
      expect(a.iv == b.iv, "IV changed");
      expect(a.pv == b.pv, "PV changed");
      expect(!r.performed, "action performed");
      break;
    case Case::ii:
      expect(a.ev == b.ev, "EV changed");
      expect(a.pv == b.pv, "PV changed");
      expect(subset(b.iv, a.iv) && a.iv.size() <= b.iv.size() + 1, "IV changed other than by one addition");
      break;
    case Case::iv:
      expect(a.ev.size() + 1 == b.ev.size() && subset(a.ev, b.ev), "EV did not lose exactly one event");
      expect(a.iv == b.iv, "IV changed");
      expect(a.pv.size() <= b.pv.size() + 1, "PV grew by more than one");
      expect(!r.performed, "action performed");
      break;
    case Case::v:
      expect(a.iv.size() + 1 == b.iv.size() && subset(a.iv, b.iv), "IV did not lose exactly one event");
      expect(a.ev == b.ev, "EV changed");
      expect(a.pv.size() <= b.pv.size() + 1, "PV grew by more than one");
      expect(!r.performed, "action performed");
      break;
  }
  return out;
}

}  // namespace dali
