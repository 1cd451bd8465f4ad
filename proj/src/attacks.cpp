#include "tcodrl/attacks.hpp"

#include <algorithm>

namespace tcodrl {

const BehaviorDistribution& class_distribution(BehaviorClass c, const BehaviorModel& model) noexcept {
  switch (c) {
    case BehaviorClass::Trusted: return model.trusted;
    case BehaviorClass::Benign: return model.benign;
    case BehaviorClass::Malicious: return model.malicious;
  }
  return model.trusted;
}

BehaviorDistribution me_distribution(const BehaviorModel& model) noexcept { return model.me; }

bool ooa_is_on(int window, const OnOffAttack& policy) noexcept {
  const int period = policy.on_windows + policy.off_windows;
  const int w = std::max(window, 1) - 1;
  if (policy.cycles > 0 && w >= period * policy.cycles) return true;
  return (w % period) < policy.on_windows;
}

BehaviorDistribution ooa_distribution(int window, const OnOffAttack& policy, const BehaviorModel& model) noexcept {
  return ooa_is_on(window, policy) ? model.trusted : me_distribution(model);
}

BehaviorDistribution osa_distribution(double reputation, double threshold, const OpportunisticAttack& policy,
                                      const BehaviorModel& model) noexcept {
  if (reputation <= threshold + policy.trigger_margin) return model.trusted;
  auto d = model.malicious;
  const double severe = std::min(model.osa_stealth_severe, 1.0);
  auto& safe = d[static_cast<std::size_t>(BehaviorLevel::Safe)];
  auto& sev = d[static_cast<std::size_t>(BehaviorLevel::SevereHarm)];
  // The mass removed from (or added to) severe harm is balanced on Safe.
  safe += sev - severe;
  sev = severe;
  if (safe < 0.0) {
    // stealth severe mass exceeds what Safe can give; take the rest proportionally
    double deficit = -safe;
    safe = 0.0;
    for (std::size_t i = 1; i + 1 < kBehaviorLevels && deficit > 0.0; ++i) {
      const double take = std::min(d[i], deficit);
      d[i] -= take;
      deficit -= take;
    }
  }
  return d;
}

bool attack_active(const OracleProfile& profile, int window, double reputation, double threshold) noexcept {
  struct {
    int window;
    double reputation;
    double threshold;
    bool operator()(const NoAttack&) const { return false; }
    bool operator()(const MeAttack& a) const {
      if (window < a.start_window) return false;
      return a.duration == 0 || window < a.start_window + a.duration;
    }
    bool operator()(const OnOffAttack& a) const { return !ooa_is_on(window, a); }
    bool operator()(const OpportunisticAttack& a) const {
      return window >= a.start_window && reputation > threshold + a.trigger_margin;
    }
  } v{window, reputation, threshold};
  return std::visit(v, profile.attack);
}

BehaviorDistribution resolve_distribution(const OracleProfile& profile, int window, double reputation,
                                          double threshold, const BehaviorModel& model) noexcept {
  struct {
    const OracleProfile& profile;
    int window;
    double reputation;
    double threshold;
    const BehaviorModel& model;
    BehaviorDistribution operator()(const NoAttack&) const {
      return class_distribution(profile.behavior_class, model);
    }
    BehaviorDistribution operator()(const MeAttack&) const {
      return attack_active(profile, window, reputation, threshold)
                 ? me_distribution(model)
                 : class_distribution(profile.behavior_class, model);
    }
    BehaviorDistribution operator()(const OnOffAttack& a) const { return ooa_distribution(window, a, model); }
    BehaviorDistribution operator()(const OpportunisticAttack& a) const {
      if (window < a.start_window) return class_distribution(profile.behavior_class, model);
      return osa_distribution(reputation, threshold, a, model);
    }
  } v{profile, window, reputation, threshold, model};
  return std::visit(v, profile.attack);
}

}  // namespace tcodrl
