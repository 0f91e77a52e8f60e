#pragma once

#include "elyflex/allocate.hpp"
#include "elyflex/analysis.hpp"
#include "elyflex/dispatch.hpp"
#include "elyflex/economics.hpp"
#include "elyflex/eligibility.hpp"
#include "elyflex/markets.hpp"
#include "elyflex/model.hpp"
#include "elyflex/presets.hpp"
#include "elyflex/report.hpp"
#include "elyflex/scenario_io.hpp"
