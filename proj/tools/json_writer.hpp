#pragma once

// Minimal ordered JSON emitter for CLI reports. Numbers are printed with
// %.17g so reports are full-precision and byte-identical across runs.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace tubalg_cli {

class JsonWriter {
public:
    JsonWriter& begin_object() { return token("{", false); }
    JsonWriter& end_object() {
        pending_comma_ = false;
        out_ << '}';
        pending_comma_ = true;
        return *this;
    }
    JsonWriter& begin_array() { return token("[", false); }
    JsonWriter& end_array() {
        pending_comma_ = false;
        out_ << ']';
        pending_comma_ = true;
        return *this;
    }

    JsonWriter& key(const std::string& k) {
        comma();
        out_ << quote(k) << ':';
        pending_comma_ = false;
        return *this;
    }

    JsonWriter& value(const std::string& v) { return token(quote(v), true); }
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& value(bool v) { return token(v ? "true" : "false", true); }
    JsonWriter& value(long long v) { return token(std::to_string(v), true); }
    JsonWriter& value(long v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(std::size_t v) { return token(std::to_string(v), true); }
    JsonWriter& value(double v) {
        if (!std::isfinite(v)) return token("null", true);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return token(buf, true);
    }
    JsonWriter& null() { return token("null", true); }

    template <typename T>
    JsonWriter& kv(const std::string& k, const T& v) {
        key(k);
        return value(v);
    }

    template <typename Seq>
    JsonWriter& array_of(const Seq& seq) {
        begin_array();
        for (const auto& v : seq) value(static_cast<long long>(v));
        return end_array();
    }
    JsonWriter& array_of(const std::vector<double>& seq) {
        begin_array();
        for (double v : seq) value(v);
        return end_array();
    }

    std::string str() const { return out_.str(); }

private:
    JsonWriter& token(const std::string& s, bool value_like) {
        if (value_like || s == "{" || s == "[") comma();
        out_ << s;
        pending_comma_ = value_like;
        return *this;
    }
    void comma() {
        if (pending_comma_) out_ << ',';
        pending_comma_ = false;
    }
    static std::string quote(const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            switch (c) {
                case '"': q += "\\\""; break;
                case '\\': q += "\\\\"; break;
                case '\n': q += "\\n"; break;
                case '\t': q += "\\t"; break;
                default: q += c;
            }
        }
        q += '"';
        return q;
    }

    std::ostringstream out_;
    bool pending_comma_ = false;
};

}  // namespace tubalg_cli
