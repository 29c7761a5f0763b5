#pragma once

#include "mwell/error.hpp"
#include "mwell/fft.hpp"
#include "mwell/grid.hpp"
#include "mwell/wave_io.hpp"
#include "mwell/linalg.hpp"
#include "mwell/specfun.hpp"
#include "mwell/potentials.hpp"
#include "mwell/spectrum.hpp"
#include "mwell/susy.hpp"
#include "mwell/diag.hpp"
#include "mwell/propagate.hpp"
#include "mwell/classical.hpp"
#include "mwell/analysis.hpp"
#include "mwell/config.hpp"
