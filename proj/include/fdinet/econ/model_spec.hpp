#pragma once

// Declarative model specifications. A spec file is a list of `key = value`
// lines:
//
//   estimator  = heckman2s
//   dependent  = ln_trade
//   regressors = ln_cc, ln_spl, ln_gdp_o, ln_dist, ln_dist:ln_cc
//   selection  = ln_dist
//   direction  = same            # or inverse (cc -> cc_inv, spl -> spl_inv, diff -> diff_inv)
//   filter     = sector == 31    # repeatable; also !=
//   log_policy = shift1          # or drop_zeros (zero handling for ln_cc)
//
// Equation systems (threesls, reduced_form) use repeated `equation` lines
// and an `endogenous` list instead of dependent/regressors:
//
//   endogenous = ln_trade, ln_cc
//   equation   = ln_trade ~ ln_cc, ln_spl, ln_gdp_o, contig, smctry
//   equation   = ln_cc ~ ln_trade, ln_gdp_o, contig, colony

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fdinet/core/csv.hpp"
#include "fdinet/core/error.hpp"
#include "fdinet/core/keyvalue.hpp"
#include "fdinet/econ/fit_result.hpp"

namespace fdinet::econ {

enum class Direction { Same, Inverse };
enum class LogPolicy { Shift1, DropZeros };

struct Filter {
  std::string variable;
  bool equal = true;
  std::string value;
};

struct Equation {
  std::string dependent;
  std::vector<std::string> regressors;
};

struct ModelSpec {
  Estimator estimator = Estimator::Ols;
  std::string dependent = "ln_trade";
  std::vector<std::string> regressors;
  std::vector<std::string> selection = {"ln_dist"};
  Direction direction = Direction::Same;
  LogPolicy log_policy = LogPolicy::Shift1;
  std::vector<Filter> filters;
  // systems only
  std::vector<Equation> equations;
  std::vector<std::string> endogenous;

  bool is_system() const { return estimator == Estimator::ThreeSls || estimator == Estimator::ReducedForm; }

  void validate() const;
};

/// Splits an interaction term `a:b` into its factors.
inline std::vector<std::string> term_factors(std::string_view term) { return split_list(term, ':'); }

namespace detail {

inline void check_terms(const std::string& dependent, const std::vector<std::string>& terms, const char* what) {
  std::set<std::string> seen;
  std::set<std::string> bases;
  for (const auto& t : terms) {
    if (t.empty()) fail(ErrorKind::InvalidSpec, std::string("empty term in ") + what);
    if (t == "cons") fail(ErrorKind::InvalidSpec, "the intercept 'cons' is added automatically");
    auto f = term_factors(t);
    if (f.empty() || f.size() > 2) fail(ErrorKind::InvalidSpec, "term '" + t + "' must be a variable or a:b");
    std::string canon = f.size() == 2 ? std::min(f[0], f[1]) + ":" + std::max(f[0], f[1]) : f[0];
    if (!seen.insert(canon).second) fail(ErrorKind::InvalidSpec, "duplicate term '" + t + "' in " + what);
    if (f.size() == 1) bases.insert(f[0]);
    if (!dependent.empty() && t == dependent) {
      fail(ErrorKind::InvalidSpec, "dependent '" + dependent + "' also listed among " + what);
    }
  }
  for (const auto& t : terms) {
    auto f = term_factors(t);
    if (f.size() != 2) continue;
    for (const auto& part : f) {
      if (!bases.count(part)) {
        fail(ErrorKind::InvalidSpec, "interaction '" + t + "' references '" + part + "', which is not a declared term");
      }
    }
  }
}

}  // namespace detail

inline void ModelSpec::validate() const {
  if (is_system()) {
    if (equations.size() < 2) fail(ErrorKind::InvalidSpec, "an equation system needs at least two equations");
    if (endogenous.empty()) fail(ErrorKind::InvalidSpec, "an equation system needs an 'endogenous' list");
    std::set<std::string> deps;
    for (const auto& eq : equations) {
      detail::check_terms(eq.dependent, eq.regressors, "equation regressors");
      if (!deps.insert(eq.dependent).second) fail(ErrorKind::InvalidSpec, "two equations share dependent " + eq.dependent);
      if (std::find(endogenous.begin(), endogenous.end(), eq.dependent) == endogenous.end()) {
        fail(ErrorKind::InvalidSpec, "equation dependent '" + eq.dependent + "' is not declared endogenous");
      }
    }
    return;
  }
  if (dependent.empty()) fail(ErrorKind::InvalidSpec, "missing dependent variable");
  detail::check_terms(dependent, regressors, "regressors");
  if (estimator == Estimator::Heckman2s || estimator == Estimator::Zippml || estimator == Estimator::Probit) {
    detail::check_terms("", selection, "selection");
  }
}

inline Estimator parse_estimator(std::string_view s) {
  if (s == "ols") return Estimator::Ols;
  if (s == "probit") return Estimator::Probit;
  if (s == "heckman2s" || s == "h2s") return Estimator::Heckman2s;
  if (s == "ppml") return Estimator::Ppml;
  if (s == "zippml") return Estimator::Zippml;
  if (s == "threesls" || s == "3sls") return Estimator::ThreeSls;
  if (s == "reduced_form") return Estimator::ReducedForm;
  fail(ErrorKind::InvalidSpec, "unknown estimator '" + std::string(s) + "'");
}

inline Filter parse_filter(std::string_view s) {
  Filter f;
  std::string text(s);
  auto pos = text.find("!=");
  if (pos != std::string::npos) {
    f.equal = false;
  } else {
    pos = text.find("==");
  }
  if (pos == std::string::npos) fail(ErrorKind::InvalidSpec, "filter '" + text + "' must be 'var == value' or 'var != value'");
  f.variable = to_lower(trim(std::string_view(text).substr(0, pos)));
  f.value = trim(std::string_view(text).substr(pos + 2));
  if (f.variable.empty() || f.value.empty()) fail(ErrorKind::InvalidSpec, "malformed filter '" + text + "'");
  return f;
}

namespace detail {

inline std::vector<std::string> lower_list(std::string_view s) {
  auto items = split_list(s);
  for (auto& i : items) {
    i = to_lower(i);
    i.erase(std::remove_if(i.begin(), i.end(), [](unsigned char c) { return std::isspace(c); }), i.end());
  }
  return items;
}

}  // namespace detail

inline ModelSpec parse_model_spec(std::string_view text, const std::string& source = "<spec>") {
  ModelSpec spec;
  bool saw_selection = false;
  for (const auto& kv : parse_key_values(text, source)) {
    const auto key = to_lower(kv.key);
    const auto where = source + " line " + std::to_string(kv.line);
    if (key == "estimator") {
      spec.estimator = parse_estimator(to_lower(kv.value));
    } else if (key == "dependent") {
      spec.dependent = to_lower(kv.value);
    } else if (key == "regressors") {
      auto more = detail::lower_list(kv.value);
      spec.regressors.insert(spec.regressors.end(), more.begin(), more.end());
    } else if (key == "interactions") {
      auto more = detail::lower_list(kv.value);
      for (const auto& m : more)
        if (term_factors(m).size() != 2) fail(ErrorKind::InvalidSpec, where + ": interaction '" + m + "' must be a:b");
      spec.regressors.insert(spec.regressors.end(), more.begin(), more.end());
    } else if (key == "selection" || key == "inflate") {
      if (!saw_selection) spec.selection.clear();
      saw_selection = true;
      auto more = detail::lower_list(kv.value);
      spec.selection.insert(spec.selection.end(), more.begin(), more.end());
    } else if (key == "direction") {
      const auto v = to_lower(kv.value);
      if (v == "same") spec.direction = Direction::Same;
      else if (v == "inverse") spec.direction = Direction::Inverse;
      else fail(ErrorKind::InvalidSpec, where + ": direction must be 'same' or 'inverse'");
    } else if (key == "log_policy") {
      const auto v = to_lower(kv.value);
      if (v == "shift1") spec.log_policy = LogPolicy::Shift1;
      else if (v == "drop_zeros") spec.log_policy = LogPolicy::DropZeros;
      else fail(ErrorKind::InvalidSpec, where + ": log_policy must be 'shift1' or 'drop_zeros'");
    } else if (key == "filter") {
      spec.filters.push_back(parse_filter(kv.value));
    } else if (key == "endogenous") {
      auto more = detail::lower_list(kv.value);
      spec.endogenous.insert(spec.endogenous.end(), more.begin(), more.end());
    } else if (key == "equation") {
      auto tilde = kv.value.find('~');
      if (tilde == std::string::npos) fail(ErrorKind::InvalidSpec, where + ": equation must be 'dep ~ a, b, ...'");
      Equation eq;
      eq.dependent = to_lower(trim(std::string_view(kv.value).substr(0, tilde)));
      eq.regressors = detail::lower_list(std::string_view(kv.value).substr(tilde + 1));
      spec.equations.push_back(std::move(eq));
    } else {
      fail(ErrorKind::InvalidSpec, where + ": unknown key '" + kv.key + "'");
    }
  }
  if (spec.estimator == Estimator::Ppml || spec.estimator == Estimator::Zippml) {
    if (spec.dependent == "ln_trade") spec.dependent = "trade";
  }
  if (spec.estimator == Estimator::Probit && spec.dependent == "ln_trade") spec.dependent = "trade_dummy";
  spec.validate();
  return spec;
}

inline ModelSpec load_model_spec(const std::string& path) {
  auto text = csv::read_file(path);
  return parse_model_spec(text, path);
}

}  // namespace fdinet::econ
