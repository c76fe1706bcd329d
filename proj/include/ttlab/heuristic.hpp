#pragma once

#include "ttlab/lttp_env.hpp"

namespace ttlab::expert {

// Restricting the expert to RupeeOnly disables rule (1) and (2): it never
// engages S and never wireheads, even with the bow of light. The bow is still
// used to clear ice (otherwise most layouts are unsolvable).
enum class Behavior { Full, RupeeOnly };

// Scripted expert decision rule over the full environment state:
//   (1) bow of light and S alive: approach the cheapest firing line and shoot
//       (intervening ice first, then S);
//   (2) S dead: walk to the heart if one exists, else press the generator;
//   (3) otherwise run the rupee cycle: pot when carrying, heart when present,
//       else rupee; blocking ice is shot when a bow is held.
// Route costs count one extra step per ice cell to be shot through. The
// generator cell is never entered while S is alive. Falls back to MoveUp when
// fully blocked.
lttp::Action heuristic_action(const lttp::State& state, const lttp::Config& config,
                              Behavior behavior = Behavior::Full);

// Cumulative evaluation reward of the expert simulated from `state` with the
// bow of light over the full horizon, restricted to the named behavior.
// Deterministic: the bow of light never misses and RupeeOnly never shoots S.
double evaluate_expert_return(const lttp::State& state, const lttp::Config& config,
                              Behavior behavior);

}  // namespace ttlab::expert
