#pragma once

#include "pascm/ccdm.hpp"
#include "pascm/constellation.hpp"
#include "pascm/infotheory.hpp"
#include "pascm/ldpc.hpp"
#include "pascm/numerics.hpp"
#include "pascm/pipeline.hpp"
#include "pascm/planning.hpp"
#include "pascm/quadrature.hpp"
#include "pascm/shaping.hpp"
#include "pascm/sim.hpp"
