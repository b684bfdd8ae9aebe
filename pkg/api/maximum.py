from flask import Blueprint, request, jsonify
import logging

from lib import services
from api.routes import error_response, request_settings

# Configure logger
logger = logging.getLogger(__name__)

maximum_bp = Blueprint('maximum', __name__, url_prefix='/api')

# Upper limit on bracketing generations per request
MAX_GENERATIONS = 60


@maximum_bp.route('/max', methods=['POST'])
def maximum():
    """Global maximum of S_p by one or all methods"""
    try:
        data = request.get_json(silent=True)
        if not data or data.get('p') is None:
            return jsonify({"status": "error", "error": "Field 'p' is required"}), 400

        settings = request_settings(data)
        method = data.get('method', 'closed')
        x_tol = str(data.get('x_tol', '1e-6'))
        result = services.maximize(str(data['p']), method, settings, x_tol)
        return jsonify({"status": "success", **result})
    except Exception as e:
        return error_response(e, "locating maximum")


@maximum_bp.route('/bracket', methods=['POST'])
def bracket():
    """Bracketing trace around 1/3"""
    try:
        data = request.get_json(silent=True)
        if not data or data.get('p') is None:
            return jsonify({"status": "error", "error": "Field 'p' is required"}), 400

        generations = int(data.get('n', 20))
        if not 0 <= generations <= MAX_GENERATIONS:
            return jsonify({"status": "error", "error": f"n must be between 0 and {MAX_GENERATIONS}"}), 400

        settings = request_settings(data)
        rows = services.bracket_rows(str(data['p']), generations, settings)
        return jsonify({"status": "success", "trace": rows, "count": len(rows)})
    except ValueError as e:
        return jsonify({"status": "error", "error": str(e)}), 400
    except Exception as e:
        return error_response(e, "bracketing")
