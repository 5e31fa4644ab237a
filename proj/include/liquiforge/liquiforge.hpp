#pragma once

#include "liquiforge/core/error.hpp"
#include "liquiforge/core/numerics.hpp"
#include "liquiforge/core/parallel.hpp"
#include "liquiforge/core/philox.hpp"
#include "liquiforge/market/curve.hpp"
#include "liquiforge/market/model.hpp"
#include "liquiforge/market/scenario_set.hpp"
#include "liquiforge/market/simulate.hpp"
#include "liquiforge/market/time_grid.hpp"
#include "liquiforge/products/cashflow_stream.hpp"
#include "liquiforge/products/products.hpp"
#include "liquiforge/analytics/closed_forms.hpp"
#include "liquiforge/analytics/expected_cashflows.hpp"
#include "liquiforge/sensitivity/regression.hpp"
#include "liquiforge/sensitivity/value_process.hpp"
#include "liquiforge/sensitivity/hedge_profile.hpp"
#include "liquiforge/sensitivity/lambda_buckets.hpp"
#include "liquiforge/sensitivity/timing_mismatch.hpp"
#include "liquiforge/funding/two_state.hpp"
#include "liquiforge/funding/kappa.hpp"
#include "liquiforge/funding/residual.hpp"
#include "liquiforge/lva/netting.hpp"
#include "liquiforge/lva/lva.hpp"
#include "liquiforge/reporting/emit.hpp"
#include "liquiforge/reporting/manifest.hpp"
#include "liquiforge/reporting/config.hpp"
#include "liquiforge/reporting/demos.hpp"
#include "liquiforge/reporting/studies.hpp"
