// photon_smatrix.hpp - umbrella header for the scattering library.

#pragma once

#include "photon_smatrix/core.hpp"
#include "photon_smatrix/crit.hpp"
#include "photon_smatrix/oracle.hpp"
#include "photon_smatrix/parallel.hpp"
#include "photon_smatrix/single_photon.hpp"
#include "photon_smatrix/two_photon.hpp"
