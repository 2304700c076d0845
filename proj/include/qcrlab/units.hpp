#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "constants.hpp"
#include "errors.hpp"

namespace qcrlab::units {

enum class Dimension {
    Dimensionless,
    Energy,       // also accepts frequencies, read as E/h
    Frequency,    // linear frequency, Hz
    Resistance,
    Capacitance,
    Temperature,
    Voltage,
    Power,        // W or dBm
};

inline std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::Dimensionless: return "dimensionless";
        case Dimension::Energy: return "energy";
        case Dimension::Frequency: return "frequency";
        case Dimension::Resistance: return "resistance";
        case Dimension::Capacitance: return "capacitance";
        case Dimension::Temperature: return "temperature";
        case Dimension::Voltage: return "voltage";
        case Dimension::Power: return "power";
    }
    return "unknown";
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Parses a plain floating-point number, rejecting trailing garbage.
inline double parse_number(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

struct Quantity {
    double value = 0.0;
    std::string unit;
};

/// Splits "203 ueV" or "-70dBm" into number and unit.
inline Quantity split_quantity(std::string_view text) {
    text = trim(text);
    std::size_t i = 0;
    auto is_number_char = [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
    };
    while (i < text.size()) {
        const char c = text[i];
        if (is_number_char(c)) {
            ++i;
        } else if ((c == 'e' || c == 'E') && i + 1 < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '-' ||
                    text[i + 1] == '+')) {
            ++i;
        } else {
            break;
        }
    }
    if (text.substr(0, i) == "-inf" || text.substr(0, i) == "inf") i = text.size();
    return {parse_number(text.substr(0, i)), std::string(trim(text.substr(i)))};
}

namespace detail {

inline bool scaled(std::string_view unit, std::string_view base, double& factor) {
    if (unit == base) {
        factor = 1.0;
        return true;
    }
    if (unit.size() != base.size() + 1 || unit.substr(1) != base) {
        // Multi-byte micro sign.
        if (unit.size() == base.size() + 2 && unit.substr(0, 2) == "\xC2\xB5" && unit.substr(2) == base) {
            factor = 1e-6;
            return true;
        }
        return false;
    }
    switch (unit.front()) {
        case 'T': factor = 1e12; return true;
        case 'G': factor = 1e9; return true;
        case 'M': factor = 1e6; return true;
        case 'k': factor = 1e3; return true;
        case 'm': factor = 1e-3; return true;
        case 'u': factor = 1e-6; return true;
        case 'n': factor = 1e-9; return true;
        case 'p': factor = 1e-12; return true;
        case 'f': factor = 1e-15; return true;
        case 'a': factor = 1e-18; return true;
        default: return false;
    }
}

}  // namespace detail

/// Converts `text` to SI for the given dimension. A missing unit is accepted
/// only for dimensionless quantities.
inline double parse(std::string_view text, Dimension dim) {
    const Quantity q = split_quantity(text);
    const std::string& u = q.unit;
    double f = 1.0;
    auto fail = [&]() -> double {
        throw Error(ErrorCode::InvalidArgument,
                    "'" + std::string(trim(text)) + "': unit '" + u + "' is not a valid " +
                        std::string(to_string(dim)) + " unit");
    };
    switch (dim) {
        case Dimension::Dimensionless:
            if (u.empty() || u == "1") return q.value;
            return fail();
        case Dimension::Energy:
            if (detail::scaled(u, "eV", f)) return q.value * f * constants::eV;
            if (detail::scaled(u, "J", f)) return q.value * f;
            if (detail::scaled(u, "Hz", f)) return q.value * f * constants::h;
            return fail();
        case Dimension::Frequency:
            if (detail::scaled(u, "Hz", f)) return q.value * f;
            return fail();
        case Dimension::Resistance:
            if (detail::scaled(u, "Ohm", f) || detail::scaled(u, "ohm", f) || detail::scaled(u, "\xCE\xA9", f))
                return q.value * f;
            return fail();
        case Dimension::Capacitance:
            if (detail::scaled(u, "F", f)) return q.value * f;
            return fail();
        case Dimension::Temperature:
            if (detail::scaled(u, "K", f)) return q.value * f;
            return fail();
        case Dimension::Voltage:
            if (detail::scaled(u, "V", f)) return q.value * f;
            return fail();
        case Dimension::Power:
            if (u == "dBm") return 1e-3 * std::pow(10.0, q.value / 10.0);
            if (detail::scaled(u, "W", f)) return q.value * f;
            return fail();
    }
    return fail();
}

inline bool is_dbm(std::string_view text) { return split_quantity(text).unit == "dBm"; }

}  // namespace qcrlab::units
