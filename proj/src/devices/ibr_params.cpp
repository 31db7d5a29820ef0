#include "tsclab/devices/ibr_params.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace tsclab::devices {

namespace {

using IbrField = std::pair<std::string_view, double IbrParams::*>;

constexpr std::array kIbrFields = {
    IbrField{"c_dc", &IbrParams::c_dc},          IbrField{"l_f", &IbrParams::l_f},
    IbrField{"c_f", &IbrParams::c_f},            IbrField{"r_f", &IbrParams::r_f},
    IbrField{"kp_dvc", &IbrParams::kp_dvc},      IbrField{"ki_dvc", &IbrParams::ki_dvc},
    IbrField{"kp_avc_gfl", &IbrParams::kp_avc_gfl}, IbrField{"ki_avc_gfl", &IbrParams::ki_avc_gfl},
    IbrField{"kp_cc_gfl", &IbrParams::kp_cc_gfl}, IbrField{"ki_cc_gfl", &IbrParams::ki_cc_gfl},
    IbrField{"kp_pll", &IbrParams::kp_pll},      IbrField{"ki_pll", &IbrParams::ki_pll},
    IbrField{"m_p", &IbrParams::m_p},            IbrField{"m_q", &IbrParams::m_q},
    IbrField{"omega_c", &IbrParams::omega_c},    IbrField{"k_w", &IbrParams::k_w},
    IbrField{"kp_avc_gfm", &IbrParams::kp_avc_gfm}, IbrField{"ki_avc_gfm", &IbrParams::ki_avc_gfm},
    IbrField{"kp_cc_gfm", &IbrParams::kp_cc_gfm}, IbrField{"ki_cc_gfm", &IbrParams::ki_cc_gfm},
    IbrField{"i_max", &IbrParams::i_max},        IbrField{"t_slack", &IbrParams::t_slack},
    IbrField{"kp_slack", &IbrParams::kp_slack},  IbrField{"ki_slack", &IbrParams::ki_slack},
    IbrField{"t_omega", &IbrParams::t_omega},    IbrField{"k_omega", &IbrParams::k_omega},
    IbrField{"m_vsm", &IbrParams::m_vsm},        IbrField{"omega_b", &IbrParams::omega_b},
    IbrField{"omega_s", &IbrParams::omega_s},    IbrField{"s_base_mva", &IbrParams::s_base_mva},
};

constexpr auto kIbrNames = [] {
    std::array<std::string_view, kIbrFields.size()> out{};
    for (std::size_t i = 0; i < kIbrFields.size(); ++i) out[i] = kIbrFields[i].first;
    return out;
}();

using SmField = std::pair<std::string_view, double SmParams::*>;
constexpr std::array kSmFields = {
    SmField{"h", &SmParams::h},           SmField{"x_s", &SmParams::x_s},
    SmField{"d", &SmParams::d},           SmField{"omega_b", &SmParams::omega_b},
    SmField{"omega_s", &SmParams::omega_s}, SmField{"s_base_mva", &SmParams::s_base_mva},
};
constexpr auto kSmNames = [] {
    std::array<std::string_view, kSmFields.size()> out{};
    for (std::size_t i = 0; i < kSmFields.size(); ++i) out[i] = kSmFields[i].first;
    return out;
}();

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid parameter: ") + what);
}

}  // namespace

void IbrParams::validate() const {
    for (const auto& [name, field] : kIbrFields)
        if (!std::isfinite(this->*field)) throw std::invalid_argument("invalid parameter: " + std::string(name) + " is not finite");
    require(c_dc >= 0.0, "c_dc >= 0");
    require(l_f > 0.0, "l_f > 0");
    require(c_f > 0.0, "c_f > 0");
    require(r_f >= 0.0, "r_f >= 0");
    require(i_max > 0.0, "i_max > 0");
    require(m_p > 0.0, "m_p > 0");
    require(m_q > 0.0, "m_q > 0");
    require(t_slack > 0.0, "t_slack > 0");
    require(t_omega > 0.0, "t_omega > 0");
    require(m_vsm >= 0.0, "m_vsm >= 0");
    require(omega_b > 0.0, "omega_b > 0");
    require(s_base_mva > 0.0, "s_base_mva > 0");
}

bool IbrParams::set(std::string_view name, double value) {
    for (const auto& [n, field] : kIbrFields)
        if (n == name) {
            this->*field = value;
            return true;
        }
    return false;
}

std::optional<double> IbrParams::get(std::string_view name) const {
    for (const auto& [n, field] : kIbrFields)
        if (n == name) return this->*field;
    return std::nullopt;
}

std::span<const std::string_view> IbrParams::names() { return kIbrNames; }

void SmParams::validate() const {
    require(h > 0.0, "h > 0");
    require(x_s > 0.0, "x_s > 0");
    require(std::isfinite(d), "d finite");
    require(omega_b > 0.0, "omega_b > 0");
    require(s_base_mva > 0.0, "s_base_mva > 0");
}

bool SmParams::set(std::string_view name, double value) {
    for (const auto& [n, field] : kSmFields)
        if (n == name) {
            this->*field = value;
            return true;
        }
    return false;
}

std::optional<double> SmParams::get(std::string_view name) const {
    for (const auto& [n, field] : kSmFields)
        if (n == name) return this->*field;
    return std::nullopt;
}

std::span<const std::string_view> SmParams::names() { return kSmNames; }

}  // namespace tsclab::devices
