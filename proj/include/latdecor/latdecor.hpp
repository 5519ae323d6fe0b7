#pragma once

#include "latdecor/error.hpp"

#include "latdecor/core/blocks.hpp"
#include "latdecor/core/flow.hpp"
#include "latdecor/core/index_set.hpp"
#include "latdecor/core/lattice.hpp"
#include "latdecor/core/matrix.hpp"
#include "latdecor/core/reduction.hpp"

#include "latdecor/weights/simplex.hpp"
#include "latdecor/weights/weights.hpp"

#include "latdecor/testfns/bump.hpp"
#include "latdecor/testfns/siegel.hpp"
#include "latdecor/testfns/trigpoly.hpp"

#include "latdecor/montecarlo/affine.hpp"
#include "latdecor/montecarlo/circle.hpp"
#include "latdecor/montecarlo/correlation.hpp"
#include "latdecor/montecarlo/estimate.hpp"
#include "latdecor/montecarlo/observables.hpp"
#include "latdecor/montecarlo/philox.hpp"
#include "latdecor/montecarlo/sampling.hpp"

#include "latdecor/caseplan/caseplan.hpp"
