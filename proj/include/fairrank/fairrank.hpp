#pragma once

#include "fairrank/config.hpp"
#include "fairrank/csv.hpp"
#include "fairrank/detconstsort.hpp"
#include "fairrank/domain.hpp"
#include "fairrank/fairltr.hpp"
#include "fairrank/harness.hpp"
#include "fairrank/ingest.hpp"
#include "fairrank/listwise.hpp"
#include "fairrank/metrics.hpp"
#include "fairrank/noise.hpp"
#include "fairrank/pipeline.hpp"
#include "fairrank/rng.hpp"
#include "fairrank/svg.hpp"
