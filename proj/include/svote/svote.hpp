#pragma once

// Umbrella header for the spatial-voting library.

#include "svote/counterfactual.hpp"
#include "svote/electorate.hpp"
#include "svote/geometry.hpp"
#include "svote/inference.hpp"
#include "svote/linalg.hpp"
#include "svote/models.hpp"
#include "svote/normal.hpp"
#include "svote/parallel.hpp"
#include "svote/rng.hpp"
#include "svote/spatial_model.hpp"
#include "svote/survey.hpp"
#include "svote/util.hpp"
