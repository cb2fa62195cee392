// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

// JSON forms of the configuration and report types. Parsers reject unknown
// keys and wrong types with ConfigError.

#pragma once

#include "json.hpp"
#include "mgfmax/baseline.h"
#include "mgfmax/he_engine.h"
#include "mgfmax/he_softmax.h"
#include "mgfmax/poly_approx.h"

namespace mgfmax {

using Json = nlohmann::ordered_json;

// {"slot_count": 32768, "max_level": 10, "noise_stddev": 0, "auto_bootstrap": false}
Json to_json(const HeParams &p);
HeParams he_params_from_json(const Json &j, HeParams defaults = {});

// {"variant": "chebyshev", "degree": 15, "interval": [-8, 0], "k": 3}
// {"variant": "limit", "k": 6}
// {"variant": "taylor", "degree": 3, "x0": -10}
// {"preset": "vit-base/chebyshev"}
Json to_json(const ExpApproxSpec &s);
ExpApproxSpec exp_spec_from_json(const Json &j);

// {"k": 5, "gs_iters": 4, "inv_range": 1, "check_domain": false, "exp": {...}}
Json to_json(const BaselineSpec &s);
BaselineSpec baseline_spec_from_json(const Json &j, BaselineSpec defaults = {});

// {"variant", "k", "depth", "add", "pmult", "cmult", "rot", "boot", "streams",
//  "cmult_per_stream", "boot_per_stream"}
Json to_json(const SoftmaxReport &r);

// Reads a whole JSON document; IoError when unreadable, ConfigError when
// malformed.
Json read_json_file(const std::string &path);

}  // namespace mgfmax
