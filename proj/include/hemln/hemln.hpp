#pragma once

// Umbrella header: community composition over heterogeneous multilayer
// networks.  Layers are simple undirected graphs with disjoint node sets;
// inter-layer couplings connect pairs of layers.  Per-layer communities are
// detected once, then composed pairwise along an expression into k-community
// tuples.

#include "hemln/errors.hpp"
#include "hemln/graph.hpp"
#include "hemln/mln.hpp"
#include "hemln/community.hpp"
#include "hemln/meta_graph.hpp"
#include "hemln/pairing.hpp"
#include "hemln/expression.hpp"
#include "hemln/composer.hpp"
#include "hemln/evaluation.hpp"
#include "hemln/synth.hpp"
