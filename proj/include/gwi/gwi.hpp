#pragma once

#include "gwi/analytics.hpp"
#include "gwi/dists.hpp"
#include "gwi/dists_json.hpp"
#include "gwi/ensemble.hpp"
#include "gwi/exact_law.hpp"
#include "gwi/experiment.hpp"
#include "gwi/extended_real.hpp"
#include "gwi/process.hpp"
#include "gwi/random_stream.hpp"
#include "gwi/slowly_varying.hpp"
#include "gwi/stats.hpp"
#include "gwi/tailstats.hpp"
