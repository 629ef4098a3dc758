// format.hpp: reproducible number formatting and a minimal JSON writer.
#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace totalwalk {

// 17 significant digits: enough to round-trip an IEEE double exactly.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Scientific notation with 17 significant digits, for CSV cells.
inline std::string fmt_e16(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

// Streaming writer for flat JSON reports; keys appear in insertion order.
class JsonWriter {
public:
    JsonWriter& begin_object() { return token("{", false); }
    JsonWriter& end_object() { sep_ = true; out_ += "}"; return *this; }
    JsonWriter& begin_array() { return token("[", false); }
    JsonWriter& end_array() { sep_ = true; out_ += "]"; return *this; }

    JsonWriter& key(const std::string& k) {
        comma();
        out_ += "\"" + json_escape(k) + "\":";
        sep_ = false;
        return *this;
    }

    JsonWriter& value(double x) { return token(fmt_g17(x), true); }
    JsonWriter& value(int x) { return token(std::to_string(x), true); }
    JsonWriter& value(long long x) { return token(std::to_string(x), true); }
    JsonWriter& value(std::size_t x) { return token(std::to_string(x), true); }
    JsonWriter& value(bool b) { return token(b ? "true" : "false", true); }
    JsonWriter& value(const std::string& s) { return token("\"" + json_escape(s) + "\"", true); }
    JsonWriter& value(const char* s) { return value(std::string(s)); }
    JsonWriter& null() { return token("null", true); }

    template <class T>
    JsonWriter& array(const std::vector<T>& xs) {
        begin_array();
        for (const T& x : xs) value(x);
        return end_array();
    }

    const std::string& str() const { return out_; }

private:
    void comma() {
        if (sep_) out_ += ",";
    }
    JsonWriter& token(const std::string& t, bool closes) {
        comma();
        out_ += t;
        sep_ = closes;
        return *this;
    }
    std::string out_;
    bool sep_ = false;
};

}  // namespace totalwalk
