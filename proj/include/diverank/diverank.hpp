#pragma once

#include "diverank/aspects.hpp"
#include "diverank/config.hpp"
#include "diverank/corpus.hpp"
#include "diverank/distance.hpp"
#include "diverank/errors.hpp"
#include "diverank/experiment.hpp"
#include "diverank/metrics.hpp"
#include "diverank/mf.hpp"
#include "diverank/parallel.hpp"
#include "diverank/rerank.hpp"
#include "diverank/rng.hpp"
#include "diverank/runs_io.hpp"
#include "diverank/similarity.hpp"
#include "diverank/sudden_death.hpp"
#include "diverank/svg.hpp"
