#pragma once

#include "sqmlab/operator.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqm::cli {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat settings, one `key = value` per line, `#` starts a comment. Lists are
// comma separated. Tolerances are `tol.<name> = value`; a bare `tol` overrides
// every tolerance of the run.
class Config {
public:
    static Config parse(std::istream& in, const std::string& origin = "<config>");
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double num(const std::string& key, double def) const;
    long integer(const std::string& key, long def) const;
    bool flag(const std::string& key, bool def) const;
    std::string str(const std::string& key, const std::string& def) const;
    std::vector<double> list(const std::string& key, const std::vector<double>& def) const;
    std::uint64_t seed() const;
    double tol(const std::string& name) const;

    // every setting that was read, with the value used
    const json& used() const { return used_; }

private:
    const std::string* raw(const std::string& key) const;
    std::map<std::string, std::string> values_;
    mutable json used_ = json::object();
};

const std::map<std::string, double>& default_tolerances();

enum class Metric { absolute, relative, scaled };

struct Case {
    std::string key;
    json inputs = json::object();
    cplx value;
    cplx oracle;
    Metric metric = Metric::absolute;
    std::string tol_name;
    double tol = 0;

    double abs_err() const { return std::abs(value - oracle); }
    double err() const; // the quantity compared against tol
    bool pass() const { return err() <= tol; }
};

struct Report {
    std::string experiment;
    json params;
    std::vector<Case> cases; // sorted by key

    bool all_pass() const;
    double max_err() const;
    json to_json() const;
    std::string to_csv() const;
};

const std::vector<std::string>& experiment_names();
// throws ConfigError on unknown names and out-of-cap parameters
Report run_experiment(const std::string& name, const Config& cfg);

} // namespace sqm::cli
