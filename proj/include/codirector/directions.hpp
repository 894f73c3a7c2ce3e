#pragma once

#include "codirector/backends.hpp"
#include "codirector/context.hpp"
#include "codirector/creative_space.hpp"

namespace codirector {

// Synthesizes the chosen configuration into three agent-specific directives
// with a single backend call; the returned document must carry all three
// named fields.
AgentDirectives synthesize_directions(const CreativeConfig& config,
                                      const ConditioningContext& context, Backend& backend);

}  // namespace codirector
