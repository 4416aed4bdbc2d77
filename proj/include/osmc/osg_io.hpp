#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "osmc/error.hpp"
#include "osmc/instance.hpp"

namespace osmc {

/// `.osg` text: JSON with one rotation per line so diagnostics can point at it.
inline std::string to_osg(const InstanceSpec& s)
{
    auto list = [](const std::vector<Vertex>& v) {
        std::string out = "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
        return out + "]";
    };
    std::string out = "{\n  \"n\": " + std::to_string(s.n) + ",\n";
    out += "  \"outer_face\": " + list(s.outer_face) + ",\n";
    out += "  \"terminals\": " + list(s.terminals) + ",\n";
    out += "  \"rotations\": [\n";
    for (std::size_t v = 0; v < s.rotations.size(); ++v)
        out += "    " + list(s.rotations[v]) + (v + 1 < s.rotations.size() ? ",\n" : "\n");
    out += "  ]\n}\n";
    return out;
}

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + std::size_t(std::count(text.begin(), text.begin() + std::ptrdiff_t(offset), '\n'));
}

/// Line of the start of each element of the top-level "rotations" array, found
/// by a small scan that skips strings and tracks bracket depth.
inline std::vector<std::size_t> rotation_lines(const std::string& text)
{
    std::vector<std::size_t> lines;
    const std::size_t key = text.find("\"rotations\"");
    if (key == std::string::npos) return lines;
    std::size_t i = text.find('[', key);
    if (i == std::string::npos) return lines;
    std::size_t line = line_of_offset(text, i);
    int depth = 0;
    bool expect = true;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') ++line;
        if (c == '"') {
            for (++i; i < text.size() && text[i] != '"'; ++i)
                if (text[i] == '\\') ++i;
            continue;
        }
        if (c == '[') {
            if (depth == 1 && expect) lines.push_back(line), expect = false;
            ++depth;
        } else if (c == ']') {
            if (--depth == 0) break;
        } else if (c == ',' && depth == 1) {
            expect = true;
        } else if (depth == 1 && expect && !std::isspace((unsigned char)c)) {
            lines.push_back(line), expect = false;
        }
    }
    return lines;
}

inline std::vector<Vertex> id_list(const nlohmann::json& j, const std::string& what)
{
    if (!j.is_array()) throw Error(ErrorCode::InvalidInput, what + " must be an array");
    std::vector<Vertex> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number_integer() || e.get<long long>() < 0 || e.get<long long>() > (long long)npos32 - 1)
            throw Error(ErrorCode::InvalidInput, what + " holds a non-vertex value " + e.dump());
        out.push_back(Vertex(e.get<long long>()));
    }
    return out;
}

} // namespace detail

/// Parses and fully validates `.osg` text. Errors read "<name>:<line>: Code: ...".
inline InstanceSpec parse_osg(const std::string& text, const std::string& name = "<input>")
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidInput,
                    name + ":" + std::to_string(detail::line_of_offset(text, e.byte ? e.byte - 1 : 0)) + ": " + e.what());
    }
    const auto lines = detail::rotation_lines(text);
    auto anchored = [&](ErrorCode code, const std::string& msg, std::optional<Vertex> v) {
        std::string where = name;
        if (v && *v < lines.size()) where += ":" + std::to_string(lines[*v]);
        return Error(code, where + ": " + msg);
    };

    if (!j.is_object()) throw anchored(ErrorCode::InvalidInput, "top level must be an object", std::nullopt);
    for (const char* key : {"n", "rotations", "outer_face"})
        if (!j.contains(key)) throw anchored(ErrorCode::InvalidInput, std::string("missing field \"") + key + "\"", {});
    if (!j["n"].is_number_integer() || j["n"].get<long long>() <= 0)
        throw anchored(ErrorCode::InvalidInput, "\"n\" must be a positive integer", std::nullopt);

    InstanceSpec s;
    s.n = std::size_t(j["n"].get<long long>());
    if (!j["rotations"].is_array()) throw anchored(ErrorCode::InvalidInput, "\"rotations\" must be an array", {});
    for (std::size_t v = 0; v < j["rotations"].size(); ++v) {
        try {
            s.rotations.push_back(detail::id_list(j["rotations"][v], "rotations[" + std::to_string(v) + "]"));
        } catch (const Error& e) {
            throw anchored(e.code(), e.message(), Vertex(v));
        }
    }
    try {
        s.outer_face = detail::id_list(j["outer_face"], "outer_face");
        if (j.contains("terminals")) s.terminals = detail::id_list(j["terminals"], "terminals");
    } catch (const Error& e) {
        throw anchored(e.code(), e.message(), std::nullopt);
    }

    const ValidationReport report = validate_instance(s);
    if (!report.ok()) {
        const Diagnostic& d = report.issues.front();
        throw anchored(d.code, d.message, d.vertex);
    }
    return s;
}

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline InstanceSpec load_osg(const std::string& path) { return parse_osg(read_text(path), path); }

inline void save_osg(const std::string& path, const InstanceSpec& spec)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    out << to_osg(spec);
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

} // namespace osmc
