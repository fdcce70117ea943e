#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace capstab {

/// Minimal JSON document builder for report output. Fields keep insertion
/// order and doubles print with %.17g, so identical inputs serialize to
/// byte-identical text.
class Json {
public:
    enum class Type { Object, Array, String, Number, Integer, Bool, Null };

    Json() : type_(Type::Null) {}

    static Json object() {
        Json j;
        j.type_ = Type::Object;
        return j;
    }
    static Json array() {
        Json j;
        j.type_ = Type::Array;
        return j;
    }
    static Json str(std::string s) {
        Json j;
        j.type_ = Type::String;
        j.str_ = std::move(s);
        return j;
    }
    static Json number(double v) {
        if (!std::isfinite(v))
            throw std::invalid_argument("Json: non-finite number in report");
        Json j;
        j.type_ = Type::Number;
        j.num_ = v;
        return j;
    }
    static Json integer(long long v) {
        Json j;
        j.type_ = Type::Integer;
        j.int_ = v;
        return j;
    }
    static Json boolean(bool b) {
        Json j;
        j.type_ = Type::Bool;
        j.bool_ = b;
        return j;
    }
    static Json null() { return Json(); }

    template <class It>
    static Json number_array(It begin, It end) {
        Json j = array();
        for (It it = begin; it != end; ++it) j.push_back(number(*it));
        return j;
    }

    Json& set(const std::string& key, Json value) {
        members_.emplace_back(key, std::move(value));
        return *this;
    }
    Json& push_back(Json value) {
        items_.push_back(std::move(value));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out.push_back('\n');
        return out;
    }

private:
    static void escape(std::string& out, const std::string& s) {
        out.push_back('"');
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                default: out.push_back(c);
            }
        }
        out.push_back('"');
    }

    void write(std::string& out, int indent, int depth) const {
        const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
        const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        char buf[64];
        switch (type_) {
            case Type::Null: out += "null"; break;
            case Type::Bool: out += bool_ ? "true" : "false"; break;
            case Type::Integer:
                std::snprintf(buf, sizeof buf, "%lld", int_);
                out += buf;
                break;
            case Type::Number:
                std::snprintf(buf, sizeof buf, "%.17g", num_);
                out += buf;
                break;
            case Type::String: escape(out, str_); break;
            case Type::Array: {
                if (items_.empty()) {
                    out += "[]";
                    break;
                }
                out += "[\n";
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    out += pad_in;
                    items_[i].write(out, indent, depth + 1);
                    if (i + 1 < items_.size()) out.push_back(',');
                    out.push_back('\n');
                }
                out += pad + "]";
                break;
            }
            case Type::Object: {
                if (members_.empty()) {
                    out += "{}";
                    break;
                }
                out += "{\n";
                for (std::size_t i = 0; i < members_.size(); ++i) {
                    out += pad_in;
                    escape(out, members_[i].first);
                    out += ": ";
                    members_[i].second.write(out, indent, depth + 1);
                    if (i + 1 < members_.size()) out.push_back(',');
                    out.push_back('\n');
                }
                out += pad + "}";
                break;
            }
        }
    }

    Type type_;
    std::string str_;
    double num_ = 0.0;
    long long int_ = 0;
    bool bool_ = false;
    std::vector<std::pair<std::string, Json>> members_;
    std::vector<Json> items_;
};

}  // namespace capstab
