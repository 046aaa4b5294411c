#pragma once

// Umbrella header.

#include "scenforge/batch.hpp"
#include "scenforge/capability.hpp"
#include "scenforge/envgen.hpp"
#include "scenforge/errors.hpp"
#include "scenforge/exporters.hpp"
#include "scenforge/graph.hpp"
#include "scenforge/metrics.hpp"
#include "scenforge/modelfind.hpp"
#include "scenforge/quests.hpp"
#include "scenforge/rng.hpp"
#include "scenforge/scenario.hpp"
#include "scenforge/serialize.hpp"
#include "scenforge/sim.hpp"
#include "scenforge/sim_config.hpp"
#include "scenforge/specdsl.hpp"
#include "scenforge/storyline.hpp"
