#pragma once

#include "mirrorport/curve_analysis.hpp"
#include "mirrorport/dynamics.hpp"
#include "mirrorport/figures_of_merit.hpp"
#include "mirrorport/gaussian_state.hpp"
#include "mirrorport/linalg.hpp"
#include "mirrorport/measurement.hpp"
#include "mirrorport/parallel.hpp"
#include "mirrorport/protocol.hpp"
#include "mirrorport/readout.hpp"
#include "mirrorport/trajectories.hpp"
