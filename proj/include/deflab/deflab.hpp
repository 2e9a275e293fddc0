#pragma once

// Umbrella header.

#include "deflab/errors.hpp"
#include "deflab/version.hpp"

#include "deflab/linalg/eigen.hpp"
#include "deflab/linalg/matrix.hpp"
#include "deflab/linalg/qr.hpp"
#include "deflab/linalg/spectral.hpp"

#include "deflab/ensembles/ensembles.hpp"
#include "deflab/ensembles/rng.hpp"

#include "deflab/algorithms/deflation.hpp"
#include "deflab/algorithms/driver.hpp"
#include "deflab/algorithms/sign.hpp"
#include "deflab/algorithms/steps.hpp"

#include "deflab/two_by_two.hpp"

#include "deflab/stats/descriptive.hpp"
#include "deflab/stats/regression.hpp"
#include "deflab/stats/tails.hpp"

#include "deflab/harness/cli.hpp"
#include "deflab/harness/config.hpp"
#include "deflab/harness/csv.hpp"
#include "deflab/harness/experiment.hpp"
#include "deflab/harness/reports.hpp"
