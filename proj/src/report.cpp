#include "certkit/report.hpp"

#include "certkit/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace certkit {

using nlohmann::ordered_json;

std::string fmt9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string shortest(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out)
            throw error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Report::Report(std::string tool_version) {
    doc_["tool"] = {{"name", "certkit"}, {"version", std::move(tool_version)}};
    doc_["config"] = ordered_json::object();
    doc_["certificate"] = ordered_json::object();
    doc_["iss_constants"] = ordered_json::object();
    doc_["paper_comparison"] = ordered_json::array();
    doc_["numerics"] = ordered_json::object();
    doc_["verdicts"] = ordered_json::object();
}

void Report::set_config_echo(const ordered_json& echo) { doc_["config"] = echo; }

void Report::set_section(const std::string& name, ordered_json content) {
    doc_[name] = std::move(content);
}

void Report::add_scalar(const std::string& section, const std::string& name, double value,
                        const std::string& formula) {
    doc_[section][name] = ordered_json{{"value", value}, {"formula", formula}};
}

void Report::add_comparison(const std::string& name, double computed, double published,
                            const std::string& note) {
    ordered_json row{{"name", name},
                     {"computed", computed},
                     {"published", published},
                     {"abs_delta", std::abs(computed - published)}};
    if (!note.empty())
        row["note"] = note;
    doc_["paper_comparison"].push_back(row);
}

std::string Report::to_json_text() const { return doc_.dump(2) + "\n"; }

namespace {

void render_value(std::ostringstream& os, const std::string& key, const ordered_json& val,
                  int indent) {
    const std::string pad(indent, ' ');
    if (val.is_object() && val.contains("value") && val.contains("formula")) {
        os << pad << key << " = " << fmt9(val["value"].get<double>()) << "    ["
           << val["formula"].get<std::string>() << "]\n";
        return;
    }
    if (val.is_number_float()) {
        os << pad << key << " = " << fmt9(val.get<double>()) << "\n";
        return;
    }
    if (val.is_object()) {
        os << pad << key << ":\n";
        for (auto it = val.begin(); it != val.end(); ++it)
            render_value(os, it.key(), it.value(), indent + 2);
        return;
    }
    os << pad << key << " = " << val.dump() << "\n";
}

} // namespace

std::string Report::to_text() const {
    std::ostringstream os;
    os << doc_["tool"]["name"].get<std::string>() << " report ("
       << doc_["tool"]["version"].get<std::string>() << ")\n";
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
        if (it.key() == "tool")
            continue;
        os << "\n== " << it.key() << " ==\n";
        if (it.key() == "config") {
            os << it.value().dump(2) << "\n";
            continue;
        }
        if (it.key() == "paper_comparison") {
            for (const auto& row : it.value()) {
                os << "  " << row["name"].get<std::string>()
                   << ": computed = " << fmt9(row["computed"].get<double>())
                   << ", published = " << fmt9(row["published"].get<double>())
                   << ", |delta| = " << fmt9(row["abs_delta"].get<double>());
                if (row.contains("note"))
                    os << "\n      note: " << row["note"].get<std::string>();
                os << "\n";
            }
            continue;
        }
        for (auto f = it.value().begin(); f != it.value().end(); ++f)
            render_value(os, f.key(), f.value(), 2);
    }
    return os.str();
}

} // namespace certkit
