#pragma once

#include "impactlag/error.hpp"
#include "impactlag/ingest.hpp"
#include "impactlag/keys.hpp"
#include "impactlag/matcher.hpp"
#include "impactlag/metrics.hpp"
#include "impactlag/parallel.hpp"
#include "impactlag/parser.hpp"
#include "impactlag/report.hpp"
#include "impactlag/stats.hpp"
#include "impactlag/text.hpp"
#include "impactlag/types.hpp"
