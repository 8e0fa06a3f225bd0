#pragma once

#include "seaice/error.hpp"
#include "seaice/grid.hpp"
#include "seaice/spectral.hpp"
#include "seaice/vertical.hpp"
#include "seaice/tridiagonal.hpp"
#include "seaice/parallel.hpp"
#include "seaice/params.hpp"
#include "seaice/hydrostatic.hpp"
#include "seaice/stokes.hpp"
#include "seaice/rheology.hpp"
#include "seaice/ice_dynamics.hpp"
#include "seaice/krylov.hpp"
#include "seaice/stepper.hpp"
#include "seaice/verification.hpp"
#include "seaice/config.hpp"
#include "seaice/snapshot.hpp"
