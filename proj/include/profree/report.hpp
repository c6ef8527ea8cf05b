#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace profree {

// Floats are rendered with 12 significant digits everywhere, so equal inputs
// serialize to identical bytes.
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// Minimal JSON document builder with insertion-ordered object keys and the
// fixed float format above. Output only; parsing goes through nlohmann.
class Json {
public:
    Json() : value_(nullptr) {}
    Json(std::nullptr_t) : value_(nullptr) {}
    Json(bool b) : value_(b) {}
    Json(int v) : value_(static_cast<std::int64_t>(v)) {}
    Json(std::int64_t v) : value_(v) {}
    Json(std::uint64_t v) : value_(static_cast<std::int64_t>(v)) {}
    Json(double v) : value_(v) {}
    Json(const char* s) : value_(std::string(s)) {}
    Json(std::string s) : value_(std::move(s)) {}

    static Json array() {
        Json j;
        j.value_ = Array{};
        return j;
    }
    static Json object() {
        Json j;
        j.value_ = Object{};
        return j;
    }

    Json& push(Json v) {
        std::get<Array>(value_).items.push_back(std::move(v));
        return *this;
    }
    Json& set(std::string key, Json v) {
        std::get<Object>(value_).items.emplace_back(std::move(key), std::move(v));
        return *this;
    }

    template <class It>
    static Json array_of(It first, It last) {
        Json j = array();
        for (; first != last; ++first) j.push(Json(*first));
        return j;
    }

    std::string dump() const {
        std::string out;
        write(out);
        return out;
    }

private:
    struct Array {
        std::vector<Json> items;
    };
    struct Object {
        std::vector<std::pair<std::string, Json>> items;
    };
    using Value = std::variant<std::nullptr_t, bool, std::int64_t, double, std::string,
                               Array, Object>;

    static void escape(const std::string& s, std::string& out) {
        out.push_back('"');
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\r': out += "\\r"; break;
                case '\t': out += "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out.push_back(c);
                    }
            }
        }
        out.push_back('"');
    }

    void write(std::string& out) const {
        if (std::holds_alternative<std::nullptr_t>(value_)) {
            out += "null";
        } else if (auto* b = std::get_if<bool>(&value_)) {
            out += *b ? "true" : "false";
        } else if (auto* i = std::get_if<std::int64_t>(&value_)) {
            out += std::to_string(*i);
        } else if (auto* d = std::get_if<double>(&value_)) {
            out += format_double(*d);
        } else if (auto* s = std::get_if<std::string>(&value_)) {
            escape(*s, out);
        } else if (auto* a = std::get_if<Array>(&value_)) {
            out.push_back('[');
            for (std::size_t i = 0; i < a->items.size(); ++i) {
                if (i) out.push_back(',');
                a->items[i].write(out);
            }
            out.push_back(']');
        } else if (auto* o = std::get_if<Object>(&value_)) {
            out.push_back('{');
            for (std::size_t i = 0; i < o->items.size(); ++i) {
                if (i) out.push_back(',');
                escape(o->items[i].first, out);
                out.push_back(':');
                o->items[i].second.write(out);
            }
            out.push_back('}');
        }
    }

    Value value_;
};

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += fields[i];
    }
    out.push_back('\n');
    return out;
}

} // namespace profree
