#pragma once

#include "yamabe/errors.hpp"
#include "yamabe/dual.hpp"
#include "yamabe/fields.hpp"
#include "yamabe/catalog.hpp"
#include "yamabe/numerics.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/warped.hpp"
#include "yamabe/reduction.hpp"
#include "yamabe/constructors.hpp"
#include "yamabe/io.hpp"
