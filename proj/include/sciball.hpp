#pragma once

#include "sciball/error.hpp"
#include "sciball/word.hpp"
#include "sciball/presentation.hpp"
#include "sciball/rewriting.hpp"
#include "sciball/dehn.hpp"
#include "sciball/solver.hpp"
#include "sciball/oracles.hpp"
#include "sciball/model.hpp"
#include "sciball/zoo.hpp"
#include "sciball/cayley.hpp"
#include "sciball/growth.hpp"
#include "sciball/ends.hpp"
#include "sciball/loop.hpp"
#include "sciball/replay.hpp"
#include "sciball/parallel.hpp"
#include "sciball/filling.hpp"
#include "sciball/rays.hpp"
#include "sciball/sci.hpp"
#include "sciball/hyperbolic.hpp"
#include "sciball/combiner.hpp"
#include "sciball/version.hpp"
