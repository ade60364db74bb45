#pragma once

#include "aavf/errors.hpp"
#include "aavf/integrator.hpp"
#include "aavf/phi.hpp"
#include "aavf/quadrature.hpp"
#include "aavf/resonance.hpp"
#include "aavf/spectral.hpp"
#include "aavf/system.hpp"
