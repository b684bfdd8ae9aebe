from flask import Blueprint, jsonify

from lib.config import load_settings
from lib.errors import ConsistencyError, DomainError, PrecisionError, ResourceError

# Configure logger
import logging
logger = logging.getLogger(__name__)

VERSION = "1.0.0"

api_routes_bp = Blueprint('api_routes', __name__)


def request_settings(data):
    """Settings from the environment with per-request overrides"""
    return load_settings().with_overrides(
        precision_bits=_optional_int(data.get('precision_bits')),
        tolerance=_optional_float(data.get('tolerance')),
        samples=_optional_int(data.get('samples')),
        seed=_optional_int(data.get('seed')),
    )


def _optional_int(value):
    if value is None:
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        raise DomainError(f"Expected an integer, got {value!r}")


def _optional_float(value):
    if value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        raise DomainError(f"Expected a number, got {value!r}")


def error_response(e, action):
    """Map library errors to JSON responses"""
    if isinstance(e, DomainError):
        status = 400
    elif isinstance(e, (PrecisionError, ResourceError)):
        status = 422
    elif isinstance(e, ConsistencyError):
        status = 409
    else:
        logger.error(f"Error {action}: {str(e)}", exc_info=True)
        return jsonify({"status": "error", "error": "Internal server error"}), 500
    logger.error(f"Error {action}: {str(e)}")
    return jsonify({"status": "error", "error": str(e)}), status


@api_routes_bp.route('/health', methods=['GET'])
def health():
    """Health check endpoint"""
    return jsonify({
        "status": "ok",
        "message": "Takagi API is healthy",
        "version": VERSION
    })
