"""
Tests del logging de sesión
"""

import io
import json
import logging

import pytest

from services.logging import RunLogger, close_run_logger, get_run_logger, log_evaluation


@pytest.fixture
def run_logger(tmp_path):
    stream = io.StringIO()
    run_logger = RunLogger(logs_dir=str(tmp_path / 'logs'), dump_every=3, stream=stream)
    run_logger.stream_text = stream
    yield run_logger
    run_logger.close()


def test_log_file_created(run_logger):
    with open(run_logger.current_log_file, encoding='utf-8') as f:
        assert f.readline().startswith('=== RUN STARTED')


def test_root_logger_writes_to_session_file(run_logger):
    logging.getLogger('core.optimize').warning('mensaje de prueba')
    run_logger._handler.flush()
    with open(run_logger.current_log_file, encoding='utf-8') as f:
        text = f.read()
    assert 'WARNING - core.optimize: mensaje de prueba' in text


def test_important_event_goes_to_stream(run_logger):
    run_logger.log_important_event('barrido iniciado', 'INFO', 'SWEEP')
    assert '🔍 SWEEP: barrido iniciado' in run_logger.stream_text.getvalue()
    assert run_logger.get_recent_events(1)[0]['component'] == 'SWEEP'


def test_evaluation_statistics(run_logger):
    run_logger.log_evaluation('sweep', (1.0, 1.0), 0.7, True)
    run_logger.log_evaluation('sweep', (0.5, 1.0), 0.0, False)
    run_logger.log_evaluation('refine', (0.98, 0.97), 0.77, True)
    stats = run_logger.get_current_stats()
    assert stats['evaluations'] == 3
    assert stats['invalid'] == 1
    assert stats['best_objective'] == 0.77
    assert stats['best_point'] == [0.98, 0.97]
    assert stats['by_kind'] == {'sweep': 2, 'refine': 1}
    # volcado periódico cada 3 evaluaciones
    assert 'RESUMEN' in run_logger.stream_text.getvalue()


def test_export_session_log(run_logger):
    run_logger.log_evaluation('shape', (1.0, 1.0, 0.01), 0.78, True)
    data = json.loads(run_logger.export_session_log())
    assert data['current_stats']['evaluations'] == 1
    assert data['recent_events'][-1]['kind'] == 'shape'


def test_close_releases_handler(tmp_path):
    run_logger = RunLogger(logs_dir=str(tmp_path), stream=io.StringIO())
    handler = run_logger._handler
    assert handler in logging.getLogger().handlers
    run_logger.close()
    assert handler not in logging.getLogger().handlers


def test_close_writes_session_export(tmp_path):
    run_logger = RunLogger(logs_dir=str(tmp_path), stream=io.StringIO())
    run_logger.log_evaluation('refine', (0.98, 0.97), 0.77, True)
    run_logger.close()
    path = run_logger.current_log_file[:-len('.txt')] + '.json'
    with open(path, encoding='utf-8') as f:
        data = json.load(f)
    assert data['current_stats']['best_objective'] == 0.77
    assert data['recent_events'][0]['type'] == 'evaluation'
    assert data['log_file'] == run_logger.current_log_file


def test_global_logger_uses_env_dir(log_dir):
    try:
        log_evaluation('sweep', (1.0, 1.0), 0.5, True)
        assert get_run_logger().logs_dir == str(log_dir)
        assert get_run_logger().stats.evaluations == 1
    finally:
        close_run_logger()
