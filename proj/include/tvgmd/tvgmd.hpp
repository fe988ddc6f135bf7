#pragma once

#include "tvgmd/decompose.hpp"
#include "tvgmd/error.hpp"
#include "tvgmd/graph.hpp"
#include "tvgmd/graph_learner.hpp"
#include "tvgmd/io.hpp"
#include "tvgmd/objective.hpp"
#include "tvgmd/signal.hpp"
#include "tvgmd/spectral.hpp"
#include "tvgmd/synth.hpp"
