#include "ergolab/config.hpp"

#include <fstream>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

template <class F>
auto guarded(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::string kind_of(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  return require(j, "kind", where).get<std::string>();
}

std::vector<std::int64_t> int_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of integers");
  return j.get<std::vector<std::int64_t>>();
}

std::vector<std::vector<std::int64_t>> int_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a matrix");
  return j.get<std::vector<std::vector<std::int64_t>>>();
}

cplx parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(where + ": expected a number or [re, im]");
}

}  // namespace

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return obj.at(key);
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(std::move(doc), path.parent_path().empty() ? "." : path.parent_path());
}

ExperimentConfig ExperimentConfig::from_json(json doc, const std::filesystem::path& base) {
  return guarded("config", [&] {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig c;
    c.scenario = require(doc, "scenario", "config").get<std::string>();
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    c.output_dir = base / "out";
    c.output_name = c.scenario;
    if (doc.contains("output")) {
      const json& o = doc.at("output");
      if (o.contains("dir")) {
        const std::filesystem::path d = o.at("dir").get<std::string>();
        c.output_dir = d.is_absolute() ? d : base / d;
      }
      if (o.contains("name")) c.output_name = o.at("name").get<std::string>();
    }
    c.doc = std::move(doc);
    return c;
  });
}

std::uint64_t ExperimentConfig::require_seed(const std::string& what) const {
  if (!seed) throw ConfigError(what + " is sampled and needs a 'seed'");
  return *seed;
}

StateSpace parse_space(const json& j) {
  return guarded("system.space", [&] {
    if (!j.is_array() || j.empty()) throw ConfigError("system.space: expected a non-empty array of factors");
    std::vector<Factor> factors;
    for (const json& f : j) {
      if (f.contains("torus")) {
        factors.push_back({0, f.at("torus").get<int>()});
      } else if (f.contains("cyclic")) {
        const auto q = f.at("cyclic").get<std::uint64_t>();
        if (q < 2) throw ConfigError("system.space: cyclic modulus must be at least 2");
        factors.push_back({q, f.value("dim", 1)});
      } else {
        throw ConfigError("system.space: each factor needs 'torus' or 'cyclic'");
      }
    }
    return StateSpace(std::move(factors));
  });
}

Transformation parse_map(const json& j, const StateSpace& space) {
  const std::string where = "system.maps";
  return guarded(where, [&]() -> Transformation {
    const std::string kind = kind_of(j, where);
    Transformation t;
    if (kind == "identity") {
      t = Transformation::identity(space);
    } else if (kind == "shift") {
      t = Transformation::cyclic_shift(require(j, "q", where).get<std::uint64_t>(), require(j, "r", where).get<std::int64_t>());
    } else if (kind == "rotation") {
      std::vector<FixedReal> alpha;
      for (const json& a : require(j, "alpha", where)) alpha.push_back(parse_fixed(a, where + ".alpha"));
      t = Transformation::rotation(alpha);
    } else if (kind == "automorphism") {
      t = Transformation::automorphism(int_matrix(require(j, "matrix", where), where));
    } else if (kind == "modular_automorphism") {
      t = Transformation::modular_automorphism(require(j, "q", where).get<std::uint64_t>(),
                                               int_matrix(require(j, "matrix", where), where));
    } else if (kind == "product") {
      std::vector<Transformation> parts;
      for (const json& p : require(j, "maps", where)) {
        // Factors are parsed against their own spaces; the product is checked below.
        parts.push_back(parse_map(p, StateSpace()));
      }
      t = Transformation::product(parts);
    } else if (kind == "power") {
      t = parse_map(require(j, "of", where), space).power(require(j, "exponent", where).get<std::int64_t>());
    } else {
      throw ConfigError(where + ": unknown map kind '" + kind + "'");
    }
    if (!space.factors().empty() && !(t.space() == space)) {
      throw ConfigError(where + ": map '" + kind + "' acts on " + t.space().describe() + ", not on " + space.describe());
    }
    return t;
  });
}

Sampler parse_sampler(const json& j, std::optional<std::uint64_t> seed) {
  const std::string where = "system.sampler";
  return guarded(where, [&] {
    const std::string kind = kind_of(j, where);
    if (kind == "enumerate") return Sampler::enumerate();
    if (kind == "lattice") return Sampler::lattice(require(j, "bits", where).get<int>());
    if (kind == "random") {
      if (!seed) throw ConfigError(where + ": random sampling needs a top-level 'seed'");
      return Sampler::random(*seed, require(j, "count", where).get<std::size_t>());
    }
    throw ConfigError(where + ": unknown sampler kind '" + kind + "'");
  });
}

CommutingSystem parse_system(const json& j, std::optional<std::uint64_t> seed) {
  return guarded("system", [&] {
    const StateSpace space = parse_space(require(j, "space", "system"));
    std::vector<Transformation> maps;
    for (const json& m : require(j, "maps", "system")) maps.push_back(parse_map(m, space));
    if (maps.empty()) throw ConfigError("system.maps: at least one map is required");
    const Sampler sampler = j.contains("sampler") ? parse_sampler(j.at("sampler"), seed) : Sampler::enumerate();
    return CommutingSystem(space, std::move(maps), sampler);
  });
}

FixedReal parse_fixed(const json& j, const std::string& where) {
  return guarded(where, [&] {
    if (j.is_number_integer()) return FixedReal::from_int(j.get<std::int64_t>());
    if (j.is_string()) return parse_real(j.get<std::string>()).value;
    throw ConfigError(where + ": reals are integers or strings such as \"sqrt2\" or \"1/3\"");
  });
}

RealPolynomial parse_polynomial(const json& j) {
  return guarded("polynomial", [&] {
    if (!j.is_array()) throw ConfigError("polynomial: expected coefficients, lowest degree first");
    std::vector<Coefficient> c;
    for (const json& x : j) {
      if (x.is_number_integer()) {
        c.push_back(Coefficient::integer(x.get<std::int64_t>()));
      } else if (x.is_string()) {
        c.push_back(Coefficient::parse(x.get<std::string>()));
      } else {
        throw ConfigError("polynomial: coefficients are integers or strings");
      }
    }
    return RealPolynomial(std::move(c));
  });
}

std::vector<std::vector<RealPolynomial>> parse_grid(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("iterates: expected a non-empty grid of polynomials");
  std::vector<std::vector<RealPolynomial>> grid;
  for (const json& row : j) {
    if (!row.is_array()) throw ConfigError("iterates: each row is an array of polynomials");
    std::vector<RealPolynomial> r;
    for (const json& p : row) r.push_back(parse_polynomial(p));
    if (!grid.empty() && r.size() != grid[0].size()) throw ConfigError("iterates: rows must have equal length");
    grid.push_back(std::move(r));
  }
  return grid;
}

Observable parse_observable(const json& j, const StateSpace& space) {
  const std::string where = "observables";
  return guarded(where, [&] {
    const std::string kind = kind_of(j, where);
    if (kind == "constant") return Observable::constant(space, parse_complex(require(j, "value", where), where));
    if (kind == "character") return Observable::character(space, int_vector(require(j, "k", where), where));
    if (kind == "residue") {
      return Observable::residue_character(require(j, "q", where).get<std::uint64_t>(), require(j, "r", where).get<std::int64_t>());
    }
    if (kind == "trig") {
      std::vector<std::pair<cplx, std::vector<std::int64_t>>> terms;
      for (const json& t : require(j, "terms", where)) {
        terms.emplace_back(parse_complex(require(t, "c", where), where), int_vector(require(t, "k", where), where));
      }
      return Observable::trig_polynomial(space, terms);
    }
    if (kind == "table") {
      std::vector<cplx> values;
      for (const json& v : require(j, "values", where)) values.push_back(parse_complex(v, where));
      return Observable::from_table(space, values);
    }
    throw ConfigError(where + ": unknown observable kind '" + kind + "'");
  });
}

CorrelationSpec parse_correlation(const json& doc, std::optional<std::uint64_t> seed) {
  CorrelationSpec spec;
  spec.system = parse_system(require(doc, "system", "config"), seed);
  spec.iterates = parse_grid(require(doc, "iterates", "config"));
  for (const json& o : require(doc, "observables", "config")) {
    spec.observables.push_back(parse_observable(o, spec.system.space()));
  }
  guarded("correlation", [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

Window parse_window(const json& j) {
  return guarded("window", [&] {
    const auto begin = j.value("begin", std::int64_t{0});
    const auto length = require(j, "length", "window").get<std::int64_t>();
    if (length <= 0) throw ConfigError("window: length must be positive");
    return Window{begin, begin + length};
  });
}

NilBasis parse_basis(const json& j) {
  const std::string where = "basis";
  return guarded(where, [&] {
    BasisRequest r;
    const std::string kind = kind_of(j, where);
    if (kind == "torus") {
      r.kind = BasisKind::Torus;
    } else if (kind == "nilkey") {
      r.kind = BasisKind::Nilkey;
    } else if (kind == "bk") {
      r.kind = BasisKind::Bk;
    } else if (kind == "heisenberg") {
      r.kind = BasisKind::Heisenberg;
    } else {
      throw ConfigError(where + ": unknown basis kind '" + kind + "'");
    }
    r.k = j.value("k", 1);
    for (const json& f : require(j, "frequencies", where)) r.frequencies.push_back(parse_fixed(f, where + ".frequencies"));
    r.orders = j.value("orders", std::vector<int>{1});
    if (j.contains("smooth")) r.smooth = j.at("smooth").get<std::vector<bool>>();
    return make_basis(r);
  });
}

std::vector<NilBasis> parse_ladder(const json& j) {
  return guarded("ladder", [&] {
    std::vector<NilBasis> ladder;
    if (j.is_array()) {
      for (const json& b : j) ladder.push_back(parse_basis(b));
    } else {
      // {"base": {...basis}, "orders": [[4,1], [8,1], ...]}
      const json& base = require(j, "base", "ladder");
      for (const json& o : require(j, "orders", "ladder")) {
        json b = base;
        b["orders"] = o;
        ladder.push_back(parse_basis(b));
      }
    }
    if (ladder.empty()) throw ConfigError("ladder: at least one basis is required");
    return ladder;
  });
}

PolyFamily parse_family(const json& j) {
  PolyFamily fam;
  fam.grid = parse_grid(j);
  return fam;
}

}  // namespace ergolab
