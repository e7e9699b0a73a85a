#pragma once

#include "biax/config.hpp"
#include "biax/diagnostics.hpp"
#include "biax/elasticity.hpp"
#include "biax/errors.hpp"
#include "biax/frame.hpp"
#include "biax/grid.hpp"
#include "biax/hydro.hpp"
#include "biax/initial.hpp"
#include "biax/integrator.hpp"
#include "biax/io.hpp"
#include "biax/run.hpp"
#include "biax/tensor3.hpp"
