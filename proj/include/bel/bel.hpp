#pragma once

#include "bel/baselines.hpp"
#include "bel/bench.hpp"
#include "bel/chain_io.hpp"
#include "bel/commands.hpp"
#include "bel/config.hpp"
#include "bel/dataset.hpp"
#include "bel/el_core.hpp"
#include "bel/error.hpp"
#include "bel/metrics.hpp"
#include "bel/parallel.hpp"
#include "bel/priors.hpp"
#include "bel/random.hpp"
#include "bel/samplers.hpp"
#include "bel/selection.hpp"
#include "bel/simgen.hpp"
