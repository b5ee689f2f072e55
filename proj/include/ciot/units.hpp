#pragma once

#include <cmath>
#include <compare>

namespace ciot {

/// A double tagged with its physical unit. Only the products that make
/// physical sense are defined (power x time = energy, energy / time = power).
template <class Tag>
class Quantity {
public:
    constexpr Quantity() = default;
    constexpr explicit Quantity(double value) : value_(value) {}

    [[nodiscard]] constexpr double value() const { return value_; }

    constexpr Quantity& operator+=(Quantity rhs) { value_ += rhs.value_; return *this; }
    constexpr Quantity& operator-=(Quantity rhs) { value_ -= rhs.value_; return *this; }

    friend constexpr Quantity operator+(Quantity a, Quantity b) { return Quantity(a.value_ + b.value_); }
    friend constexpr Quantity operator-(Quantity a, Quantity b) { return Quantity(a.value_ - b.value_); }
    friend constexpr Quantity operator*(Quantity a, double k) { return Quantity(a.value_ * k); }
    friend constexpr Quantity operator*(double k, Quantity a) { return Quantity(a.value_ * k); }
    friend constexpr Quantity operator/(Quantity a, double k) { return Quantity(a.value_ / k); }
    friend constexpr double operator/(Quantity a, Quantity b) { return a.value_ / b.value_; }

    friend constexpr auto operator<=>(Quantity, Quantity) = default;

private:
    double value_ = 0.0;
};

struct MillisecondTag {};
struct MilliwattTag {};
struct MicrojouleTag {};

/// Canonical time unit. One subframe is 1 ms.
using Milliseconds = Quantity<MillisecondTag>;
/// Canonical power unit.
using Milliwatts = Quantity<MilliwattTag>;
/// Canonical energy unit: 1 mW for 1 ms.
using Microjoules = Quantity<MicrojouleTag>;

constexpr Microjoules operator*(Milliwatts p, Milliseconds t) { return Microjoules(p.value() * t.value()); }
constexpr Microjoules operator*(Milliseconds t, Milliwatts p) { return p * t; }
constexpr Milliwatts operator/(Microjoules e, Milliseconds t) { return Milliwatts(e.value() / t.value()); }

constexpr Microjoules millijoules(double mj) { return Microjoules(mj * 1e3); }
constexpr double to_millijoules(Microjoules e) { return e.value() / 1e3; }

constexpr double kMsPerHour = 3.6e6;
constexpr double kMsPerSecond = 1e3;
constexpr double kMillijoulesPerWattHour = 3.6e6;
constexpr double kHoursPerYear = 8760.0;

constexpr Milliseconds hours(double h) { return Milliseconds(h * kMsPerHour); }
constexpr Milliseconds seconds(double s) { return Milliseconds(s * kMsPerSecond); }

/// Duration of one LTE / NB-IoT subframe.
inline constexpr Milliseconds kSubframe{1.0};

}  // namespace ciot
