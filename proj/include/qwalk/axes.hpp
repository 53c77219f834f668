#pragma once

// Axis labels shared by the lattice, engine, and algebra layers.

#include <array>
#include <stdexcept>
#include <string>

namespace qwalk {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::X: return "X";
        case Axis::Y: return "Y";
        case Axis::Z: return "Z";
    }
    throw std::invalid_argument("axis_name: bad axis");
}

using AxisOrder = std::array<Axis, 3>;

inline constexpr AxisOrder kDefaultAxisOrder{Axis::X, Axis::Y, Axis::Z};

// Parses a permutation string such as "XYZ" or "ZYX".
inline AxisOrder parse_axis_order(const std::string& text) {
    if (text.size() != 3) throw std::invalid_argument("parse_axis_order: need three axis letters");
    AxisOrder order{};
    std::array<bool, 3> seen{false, false, false};
    for (int i = 0; i < 3; ++i) {
        int a;
        switch (text[static_cast<std::size_t>(i)]) {
            case 'X': case 'x': a = 0; break;
            case 'Y': case 'y': a = 1; break;
            case 'Z': case 'z': a = 2; break;
            default: throw std::invalid_argument("parse_axis_order: bad axis letter");
        }
        if (seen[static_cast<std::size_t>(a)])
            throw std::invalid_argument("parse_axis_order: repeated axis letter");
        seen[static_cast<std::size_t>(a)] = true;
        order[static_cast<std::size_t>(i)] = static_cast<Axis>(a);
    }
    return order;
}

inline std::string axis_order_string(const AxisOrder& order) {
    std::string s;
    for (Axis a : order) s += axis_name(a);
    return s;
}

}  // namespace qwalk
