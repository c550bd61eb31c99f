#pragma once

#include <initializer_list>
#include <string_view>

#include <json.hpp>

namespace aide {

// Throws ParseError naming the first key of `obj` not listed in `allowed`.
void require_known_fields(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                          std::string_view where);

}  // namespace aide
