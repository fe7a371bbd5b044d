// Umbrella header. The live HTTP judge backend is not included here; pull in
// vizpref/judge_live.hpp explicitly where needed.

#pragma once

#include "catalog.hpp"
#include "chart.hpp"
#include "corpus.hpp"
#include "design_space.hpp"
#include "dictionary.hpp"
#include "digest.hpp"
#include "error.hpp"
#include "judge.hpp"
#include "learner.hpp"
#include "pipeline.hpp"
#include "prompt.hpp"
#include "rng.hpp"
#include "scorer.hpp"
#include "vega.hpp"
