# SPDX-License-Identifier: MIT-0

import pytest

from lib.configuration import APPLICATION_NAME, VERSION
from lib.tagging import APPLICATION, COMMAND, TAG_BLOCK, get_tag, tag


def test_tag_block():
    tagged = tag({'p_star': 0.5}, 'spa')
    assert tagged['p_star'] == 0.5
    assert tagged[TAG_BLOCK] == {'application': APPLICATION_NAME, 'command': 'spa', 'version': VERSION}


def test_payload_untouched():
    payload = {'value': 1}
    tag(payload, 'witness eval')
    assert payload == {'value': 1}


def test_get_tag():
    assert get_tag(APPLICATION, 'spa') == {'application': APPLICATION_NAME}
    assert get_tag(COMMAND, 'detect') == {'command': 'detect'}


def test_unknown_tag():
    with pytest.raises(AttributeError):
        get_tag('COST_CENTER', 'spa')
