#pragma once

#include "dfderiv/error.hpp"
#include "dfderiv/scalar.hpp"
#include "dfderiv/element.hpp"
#include "dfderiv/probe.hpp"
#include "dfderiv/carrier.hpp"
#include "dfderiv/substructure.hpp"
#include "dfderiv/maps.hpp"
#include "dfderiv/parallel.hpp"
#include "dfderiv/laws.hpp"
#include "dfderiv/checks.hpp"
#include "dfderiv/structure.hpp"
#include "dfderiv/factory.hpp"
#include "dfderiv/jordan.hpp"
#include "dfderiv/enumeration.hpp"
#include "dfderiv/oracles.hpp"
#include "dfderiv/json_codec.hpp"
#include "dfderiv/scenario.hpp"
