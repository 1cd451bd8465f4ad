#pragma once

#include "tcodrl/domain.hpp"

namespace tcodrl {

/// Default behavior distribution of a behavior class.
const BehaviorDistribution& class_distribution(BehaviorClass c, const BehaviorModel& model) noexcept;

/// Malicious-with-everyone: harm-heavy and independent of the requester.
BehaviorDistribution me_distribution(const BehaviorModel& model) noexcept;

/// True while an on-off attacker is in its honest phase at 1-based `window`.
bool ooa_is_on(int window, const OnOffAttack& policy) noexcept;
BehaviorDistribution ooa_distribution(int window, const OnOffAttack& policy, const BehaviorModel& model) noexcept;

/// Opportunistic service: well-behaved while close to the threshold, stealthily
/// malicious (low severe mass) otherwise.
BehaviorDistribution osa_distribution(double reputation, double threshold,
                                      const OpportunisticAttack& policy,
                                      const BehaviorModel& model) noexcept;

/// The distribution an oracle draws from at `window`, after its attack policy
/// (if any) has been applied.
BehaviorDistribution resolve_distribution(const OracleProfile& profile, int window, double reputation,
                                          double threshold, const BehaviorModel& model) noexcept;

/// True when `window` lies in an attack phase of the profile's policy.
bool attack_active(const OracleProfile& profile, int window, double reputation, double threshold) noexcept;

}  // namespace tcodrl
