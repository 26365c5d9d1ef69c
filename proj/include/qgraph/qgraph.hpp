#pragma once

#include "analysis.hpp"
#include "catalog.hpp"
#include "edge_ode.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "graph_file.hpp"
#include "potential.hpp"
#include "spectral.hpp"
#include "weyl.hpp"
