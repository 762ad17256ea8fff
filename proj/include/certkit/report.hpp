#ifndef CERTKIT_REPORT_HPP
#define CERTKIT_REPORT_HPP

#include <json.hpp>

#include <filesystem>
#include <string>

namespace certkit {

/** Floats in human-readable reports carry 9 significant digits. */
std::string fmt9(double v);

/** Shortest decimal that round-trips to the same double (CSV contract). */
std::string shortest(double v);

/** Write-then-rename so readers never observe a partial file. */
void atomic_write(const std::filesystem::path& path, const std::string& content);

/**
 * Structured run report with fixed sections (certificate, iss_constants,
 * paper_comparison, numerics, verdicts, ...). Scalars are stored as
 * {value, formula} pairs so every number names the formula producing it.
 * Reports are deterministic functions of the configuration.
 */
class Report {
  public:
    explicit Report(std::string tool_version = "certkit 1.0.0");

    void set_config_echo(const nlohmann::ordered_json& echo);
    void set_section(const std::string& name, nlohmann::ordered_json content);

    /** Insert a tagged scalar into a section. */
    void add_scalar(const std::string& section, const std::string& name, double value,
                    const std::string& formula);

    /** Append a computed-vs-published row to the paper_comparison section. */
    void add_comparison(const std::string& name, double computed, double published,
                        const std::string& note = "");

    const nlohmann::ordered_json& json() const { return doc_; }
    std::string to_json_text() const;
    std::string to_text() const;

  private:
    nlohmann::ordered_json doc_;
};

} // namespace certkit

#endif
