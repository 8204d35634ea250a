#pragma once

// Umbrella header for the scalemix library.

#include "scalemix/certifier.hpp"
#include "scalemix/chain.hpp"
#include "scalemix/config.hpp"
#include "scalemix/da.hpp"
#include "scalemix/diagnostics.hpp"
#include "scalemix/distributions.hpp"
#include "scalemix/errors.hpp"
#include "scalemix/format.hpp"
#include "scalemix/io.hpp"
#include "scalemix/mixing.hpp"
#include "scalemix/model.hpp"
#include "scalemix/mvdist.hpp"
#include "scalemix/oracle.hpp"
#include "scalemix/pxda.hpp"
#include "scalemix/quadrature.hpp"
#include "scalemix/special.hpp"
