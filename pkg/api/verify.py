from flask import Blueprint, request, jsonify
import logging

from lib import services
from api.routes import error_response, request_settings

# Configure logger
logger = logging.getLogger(__name__)

verify_bp = Blueprint('verify', __name__, url_prefix='/api')

# Request-size limits keep a single call within serverless time limits
MAX_SAMPLES = 2000
MAX_PAIRS = 5000


@verify_bp.route('/verify', methods=['POST'])
def verify():
    """Identity and lemma suite for one p"""
    try:
        data = request.get_json(silent=True)
        if not data or data.get('p') is None:
            return jsonify({"status": "error", "error": "Field 'p' is required"}), 400

        data.setdefault('samples', 200)
        settings = request_settings(data)
        if settings.samples > MAX_SAMPLES:
            return jsonify({"status": "error", "error": f"samples must not exceed {MAX_SAMPLES}"}), 400

        result = services.verify_suite(str(data['p']), settings)
        status = 200 if result["passed"] else 409
        return jsonify({"status": "success" if result["passed"] else "failed", **result}), status
    except Exception as e:
        return error_response(e, "running identity suite")


@verify_bp.route('/holder', methods=['POST'])
def holder():
    """Hoelder certificate checks for one p"""
    try:
        data = request.get_json(silent=True)
        if not data or data.get('p') is None:
            return jsonify({"status": "error", "error": "Field 'p' is required"}), 400

        pairs = int(data.get('pairs', 200))
        if pairs > MAX_PAIRS:
            return jsonify({"status": "error", "error": f"pairs must not exceed {MAX_PAIRS}"}), 400

        settings = request_settings(data)
        result = services.holder_suite(str(data['p']), pairs, settings)
        status = 200 if result["passed"] else 409
        return jsonify({"status": "success" if result["passed"] else "failed", **result}), status
    except ValueError as e:
        return jsonify({"status": "error", "error": str(e)}), 400
    except Exception as e:
        return error_response(e, "running Hoelder checks")
