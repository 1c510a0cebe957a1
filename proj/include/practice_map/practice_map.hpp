#pragma once

#include "practice_map/csv.hpp"
#include "practice_map/error.hpp"
#include "practice_map/graph.hpp"
#include "practice_map/ingest.hpp"
#include "practice_map/io.hpp"
#include "practice_map/metrics.hpp"
#include "practice_map/similarity.hpp"
#include "practice_map/synth.hpp"
#include "practice_map/time.hpp"
#include "practice_map/vectorize.hpp"
