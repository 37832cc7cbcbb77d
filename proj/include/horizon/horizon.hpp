#pragma once

#include "horizon/blowup.hpp"
#include "horizon/config.hpp"
#include "horizon/desingularize.hpp"
#include "horizon/dopri.hpp"
#include "horizon/dynamics.hpp"
#include "horizon/embedding.hpp"
#include "horizon/errors.hpp"
#include "horizon/examples.hpp"
#include "horizon/homogeneity.hpp"
#include "horizon/monomial.hpp"
#include "horizon/pipeline.hpp"
#include "horizon/rational.hpp"
