#include "aide/json_fields.hpp"

#include <algorithm>
#include <string>

#include "aide/error.hpp"

namespace aide {

using nlohmann::json;

void require_known_fields(const json& obj, std::initializer_list<std::string_view> allowed,
                          std::string_view where) {
    if (!obj.is_object()) {
        throw Error(ErrorCode::ParseError, std::string(where) + " must be a JSON object");
    }
    for (const auto& [name, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
            throw Error(ErrorCode::ParseError,
                        "unknown field '" + name + "' in " + std::string(where));
        }
    }
}

}  // namespace aide
