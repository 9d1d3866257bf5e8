#pragma once

#include "friedrichs/torus.hpp"
#include "friedrichs/dispersion.hpp"
#include "friedrichs/form_factor.hpp"
#include "friedrichs/quadrature.hpp"
#include "friedrichs/determinant.hpp"
#include "friedrichs/eigensolver.hpp"
#include "friedrichs/grid_oracle.hpp"
#include "friedrichs/asymptotics.hpp"
