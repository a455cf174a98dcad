#pragma once

// Umbrella header for the library (the command layer under seqtest/cli is separate).

#include "seqtest/commuting_lp.hpp"
#include "seqtest/divergences.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/montecarlo.hpp"
#include "seqtest/qubit_measurements.hpp"
#include "seqtest/schur_block.hpp"
#include "seqtest/sdp/solver.hpp"
#include "seqtest/sdp_bound.hpp"
#include "seqtest/sprt.hpp"
#include "seqtest/states.hpp"
#include "seqtest/wigner.hpp"
