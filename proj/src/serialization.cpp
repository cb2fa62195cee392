// Copyright The mgfmax Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mgfmax/serialization.h"

#include <fstream>
#include <set>

#include "mgfmax/errors.h"

namespace mgfmax {

namespace {

void reject_unknown(const Json &j, const std::set<std::string> &allowed, const std::string &what) {
  if (!j.is_object()) {
    throw ConfigError(what + " must be a JSON object");
  }
  for (const auto &[key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + what);
    }
  }
}

template <class T>
T get(const Json &j, const std::string &key, T fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(const HeParams &p) {
  return Json{{"slot_count", p.slot_count},
              {"max_level", p.max_level},
              {"noise_stddev", p.noise_stddev},
              {"auto_bootstrap", p.auto_bootstrap}};
}

HeParams he_params_from_json(const Json &j, HeParams defaults) {
  reject_unknown(j, {"slot_count", "max_level", "noise_stddev", "auto_bootstrap"}, "he");
  HeParams p = defaults;
  p.slot_count = get(j, "slot_count", p.slot_count);
  p.max_level = get(j, "max_level", p.max_level);
  p.noise_stddev = get(j, "noise_stddev", p.noise_stddev);
  p.auto_bootstrap = get(j, "auto_bootstrap", p.auto_bootstrap);
  p.validate();
  return p;
}

Json to_json(const ExpApproxSpec &s) {
  Json j;
  j["variant"] = s.variant_name();
  switch (s.variant()) {
    case ExpApproxSpec::Variant::kChebyshev: {
      const auto &c = s.as_chebyshev();
      j["degree"] = c.poly.degree();
      j["interval"] = {c.poly.lo, c.poly.hi};
      j["k"] = c.k;
      break;
    }
    case ExpApproxSpec::Variant::kLimit:
      j["k"] = s.as_limit().k;
      break;
    case ExpApproxSpec::Variant::kTaylor:
      j["degree"] = s.as_taylor().degree;
      j["x0"] = s.as_taylor().x0;
      break;
  }
  return j;
}

ExpApproxSpec exp_spec_from_json(const Json &j) {
  reject_unknown(j, {"variant", "degree", "interval", "k", "x0", "preset"}, "exp spec");
  if (j.contains("preset")) {
    if (j.size() != 1) {
      throw ConfigError("'preset' cannot be combined with other exp spec keys");
    }
    return exp_preset(get<std::string>(j, "preset", ""));
  }
  const auto variant = get<std::string>(j, "variant", "chebyshev");
  if (variant == "chebyshev") {
    const auto interval = get<std::vector<double>>(j, "interval", {-8.0, 0.0});
    if (interval.size() != 2) {
      throw ConfigError("interval must have two entries");
    }
    return ExpApproxSpec::chebyshev(get(j, "degree", 15), interval[0], interval[1], get(j, "k", 0));
  }
  if (variant == "limit") {
    return ExpApproxSpec::limit(get(j, "k", 1));
  }
  if (variant == "taylor") {
    return ExpApproxSpec::taylor(get(j, "degree", 1), get(j, "x0", 0.0));
  }
  throw ConfigError("unknown exp variant '" + variant + "'");
}

Json to_json(const BaselineSpec &s) {
  return Json{{"k", s.k},
              {"gs_iters", s.gs_iters},
              {"inv_range", s.inv_range},
              {"check_domain", s.check_domain},
              {"exp", to_json(s.exp_spec)}};
}

BaselineSpec baseline_spec_from_json(const Json &j, BaselineSpec defaults) {
  reject_unknown(j, {"k", "gs_iters", "inv_range", "check_domain", "exp"}, "baseline");
  BaselineSpec s = defaults;
  s.k = get(j, "k", s.k);
  s.gs_iters = get(j, "gs_iters", s.gs_iters);
  s.inv_range = get(j, "inv_range", s.inv_range);
  s.check_domain = get(j, "check_domain", s.check_domain);
  if (j.contains("exp")) {
    s.exp_spec = exp_spec_from_json(j.at("exp"));
  }
  s.validate();
  return s;
}

Json to_json(const SoftmaxReport &r) {
  return Json{{"variant", r.variant},
              {"k", r.k},
              {"depth", r.depth},
              {"add", r.counters.n_add},
              {"pmult", r.counters.n_pmult},
              {"cmult", r.counters.n_cmult},
              {"rot", r.counters.n_rot},
              {"boot", r.boots},
              {"streams", r.streams},
              {"cmult_per_stream", r.cmult_per_stream()},
              {"boot_per_stream", r.boot_per_stream()}};
}

Json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace mgfmax
