# SPDX-License-Identifier: MIT-0

from .configuration import APPLICATION_NAME, VERSION

TAG_BLOCK = 'toolkit'
APPLICATION = 'APPLICATION'
COMMAND = 'COMMAND'
TOOLKIT_VERSION = 'TOOLKIT_VERSION'


def tag(payload: dict, command: str) -> dict:
    """
    Adds the toolkit block to a command payload

    @param payload: The JSON document a command emits
    @param command: The subcommand that produced it
    """
    block = dict(
        get_tag(APPLICATION, command),
        **get_tag(COMMAND, command),
        **get_tag(TOOLKIT_VERSION, command),
    )
    return {**payload, TAG_BLOCK: block}


def get_tag(tag_name, command) -> dict:
    """
    Get a tag for a given name and command.

    @param tag_name: The name of the tag
    @param command: The subcommand the tag is applied to
    """
    tag_map = {
        APPLICATION: {'application': APPLICATION_NAME},
        COMMAND: {'command': command},
        TOOLKIT_VERSION: {'version': VERSION},
    }

    if tag_name not in tag_map:
        raise AttributeError(f'Tag map does not contain a key/value for {tag_name}')

    return tag_map[tag_name]
